// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo experiment driver behind `rispart simulate`.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rispart/config.hpp"
#include "rispart/solver.hpp"

namespace rispart {

enum class SweepVariable { None, N, M, P, Snr };
enum class PsiMode { Random, Refine };

const char* to_string(SweepVariable v);
const char* to_string(PsiMode m);
SweepVariable parse_sweep_variable(const std::string& text);
PsiMode parse_psi_mode(const std::string& text);
/// "grid", "lm" or "both".
std::vector<SolverKind> parse_solver_selection(const std::string& text);
const char* solver_label(SolverKind kind);

struct ExperimentSpec {
  SimulationConfig config;
  SweepVariable sweep = SweepVariable::None;
  std::vector<std::string> values;  // raw sweep values: "30x90", "16", "30 dBm", "10"
  std::optional<double> p0_w;       // M sweep: P = P0 / (Mt Mr)
  std::vector<SolverKind> solvers{SolverKind::Lm};
  PsiMode psi = PsiMode::Random;
  bool evaluate_finite = true;
  std::string output;  // CSV path; empty writes nothing
  std::size_t jobs = 1;

  void validate() const;
  /// Configuration for sweep entry `index` (the base config when there is no sweep).
  SimulationConfig config_for(std::size_t index) const;
  std::size_t sweep_size() const { return values.empty() ? 1 : values.size(); }
};

/// Reads [system], [link], [run] and the optional [experiment] section.
ExperimentSpec experiment_from(const ConfigDocument& doc);

struct ResultRow {
  std::size_t sweep_index = 0;
  std::string sweep_value;
  std::size_t realization = 0;
  std::uint64_t seed = 0;
  std::string solver;
  double rate_asymptotic = 0.0;
  double rate_finite = 0.0;
  double rate_fixed_s1 = 0.0;
  std::size_t active_cascaded = 0;
  std::size_t active_direct = 0;
  std::size_t s_min_star = 0;
  bool reallocated = false;
  std::string status = "ok";
  double wall_ms = 0.0;  // written to the timing file only
};

struct SummaryRow {
  std::size_t sweep_index = 0;
  std::string sweep_value;
  std::string solver;
  std::size_t rows = 0;
  std::size_t failures = 0;
  double mean_rate_asymptotic = 0.0;
  double mean_rate_finite = 0.0;
  double mean_rate_fixed_s1 = 0.0;
  double mean_active_cascaded = 0.0;
  double mean_active_direct = 0.0;
  std::vector<std::size_t> cascaded_histogram;  // index = activated count
  std::vector<std::size_t> direct_histogram;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
};

/// Channel draw for one realization seed. Each hop and the psi draw use their own sub-stream.
ChannelRealization draw_realization(const SimulationConfig& config, std::uint64_t seed, bool synthesize = true);

ExperimentResult run_experiment(const ExperimentSpec& spec);

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);
void write_timing_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_metadata_json(std::ostream& out, const ExperimentSpec& spec);

/// Writes <output>, <output>.summary.csv, <output>.timing.csv and <output>.meta.json.
void write_experiment_files(const ExperimentSpec& spec, const ExperimentResult& result);

std::string git_describe();

}  // namespace rispart
