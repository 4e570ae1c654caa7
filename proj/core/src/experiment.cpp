// SPDX-License-Identifier: Apache-2.0

#include "rispart/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "rispart/finite.hpp"

#ifndef RISPART_GIT_DESCRIBE
#define RISPART_GIT_DESCRIBE "unknown"
#endif

namespace rispart {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::size_t parse_size(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + text + "'");
  return static_cast<std::size_t>(std::stoull(t));
}

double parse_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(trim(text), &used);
    if (trim(text).size() != used) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
  }
}

}  // namespace

const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::None: return "none";
    case SweepVariable::N: return "N";
    case SweepVariable::M: return "M";
    case SweepVariable::P: return "P";
    case SweepVariable::Snr: return "SNR";
  }
  return "none";
}

const char* to_string(PsiMode m) { return m == PsiMode::Random ? "random" : "refine"; }

SweepVariable parse_sweep_variable(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || t == "none") return SweepVariable::None;
  if (t == "N") return SweepVariable::N;
  if (t == "M") return SweepVariable::M;
  if (t == "P") return SweepVariable::P;
  if (t == "SNR" || t == "snr") return SweepVariable::Snr;
  throw ConfigError("config: unknown sweep variable '" + text + "' (expected N, M, P or SNR)");
}

PsiMode parse_psi_mode(const std::string& text) {
  const std::string t = trim(text);
  if (t == "random") return PsiMode::Random;
  if (t == "refine") return PsiMode::Refine;
  throw ConfigError("config: unknown psi mode '" + text + "' (expected random or refine)");
}

std::vector<SolverKind> parse_solver_selection(const std::string& text) {
  const std::string t = trim(text);
  if (t == "grid") return {SolverKind::Grid};
  if (t == "lm") return {SolverKind::Lm};
  if (t == "both") return {SolverKind::Grid, SolverKind::Lm};
  throw ConfigError("config: unknown solver '" + text + "' (expected grid, lm or both)");
}

const char* solver_label(SolverKind kind) {
  switch (kind) {
    case SolverKind::Grid: return "grid";
    case SolverKind::Lm: return "lm";
    case SolverKind::Both: return "grid+lm";
  }
  return "grid";
}

void ExperimentSpec::validate() const {
  config.validate();
  if (sweep != SweepVariable::None && values.empty()) throw ConfigError("experiment: sweep has no values");
  if (solvers.empty()) throw ConfigError("experiment: no solver selected");
  if (jobs == 0) throw ConfigError("experiment: jobs must be >= 1");
  for (std::size_t i = 0; i < sweep_size(); ++i) config_for(i).validate();
}

SimulationConfig ExperimentSpec::config_for(std::size_t index) const {
  SimulationConfig c = config;
  if (sweep == SweepVariable::None) return c;
  const std::string& value = values.at(index);
  switch (sweep) {
    case SweepVariable::N: {
      ConfigDocument doc{{"system.N", value}};
      const auto shaped = simulation_config_from(doc);
      c.nx = shaped.nx;
      c.ny = shaped.ny;
      break;
    }
    case SweepVariable::M:
      c.mt = c.mr = parse_size("experiment.values", value);
      if (p0_w) c.power_w = *p0_w / (static_cast<double>(c.mt) * static_cast<double>(c.mr));
      break;
    case SweepVariable::P:
      c.power_w = parse_power_w(value);
      break;
    case SweepVariable::Snr:
      c.power_w = c.noise_power_w * std::pow(10.0, parse_number("experiment.values", value) / 10.0);
      break;
    case SweepVariable::None:
      break;
  }
  return c;
}

ExperimentSpec experiment_from(const ConfigDocument& doc) {
  ExperimentSpec spec;
  spec.config = simulation_config_from(doc);
  for (const auto& [key, value] : doc) {
    if (key.rfind("experiment.", 0) != 0) continue;
    const std::string name = key.substr(11);
    if (name == "sweep") spec.sweep = parse_sweep_variable(value);
    else if (name == "values") spec.values = split_list(value);
    else if (name == "P0") spec.p0_w = parse_power_w(value);
    else if (name == "solver") spec.solvers = parse_solver_selection(value);
    else if (name == "psi") spec.psi = parse_psi_mode(value);
    else if (name == "finite") spec.evaluate_finite = trim(value) != "false" && trim(value) != "0";
    else if (name == "out") spec.output = trim(value);
    else if (name == "jobs") spec.jobs = parse_size(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  if (spec.sweep == SweepVariable::None) spec.values.clear();
  if (spec.p0_w && spec.sweep != SweepVariable::M) throw ConfigError("config: P0 only applies to an M sweep");
  for (const auto& entry : doc) {
    const auto dot = entry.first.find('.');
    if (dot == std::string::npos) throw ConfigError("config: key '" + entry.first + "' is outside any section");
    const std::string section = entry.first.substr(0, dot);
    if (section != "system" && section != "link" && section != "run" && section != "experiment")
      throw ConfigError("config: unknown section '" + section + "'");
  }
  spec.validate();
  return spec;
}

ChannelRealization draw_realization(const SimulationConfig& cfg, std::uint64_t seed, bool synthesize) {
  const Rng root(seed);
  Rng tx_ris = root.split(0);
  Rng ris_rx = root.split(1);
  Rng tx_rx = root.split(2);
  ChannelRealization r;
  r.tx_ris = sample_paths(tx_ris, cfg.l1, Hop::TxRis);
  r.ris_rx = sample_paths(ris_rx, cfg.l2, Hop::RisRx);
  if (cfg.l3 > 0) r.tx_rx = sample_paths(tx_rx, cfg.l3, Hop::TxRx);
  const auto pl = cfg.path_losses();
  r.pl_cascaded = pl.cascaded;
  r.pl_direct = pl.direct;
  r.noise_power = cfg.noise_power_w;
  if (synthesize) {
    const auto tx = cfg.tx_geometry();
    const auto rx = cfg.rx_geometry();
    const auto ris = cfg.ris_geometry();
    r.h1 = synth_tx_ris(r.tx_ris, tx, ris);
    r.h2 = synth_ris_rx(r.ris_rx, ris, rx);
    r.h3 = cfg.l3 > 0 ? synth_tx_rx(r.tx_rx, tx, rx)
                      : Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(cfg.mr), static_cast<Eigen::Index>(cfg.mt));
  }
  return r;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  struct Task {
    std::size_t sweep_index;
    std::size_t realization;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < spec.sweep_size(); ++s)
    for (std::size_t r = 0; r < spec.config.realizations; ++r) tasks.push_back({s, r});

  std::vector<SimulationConfig> configs;
  for (std::size_t s = 0; s < spec.sweep_size(); ++s) configs.push_back(spec.config_for(s));

  std::vector<std::vector<ResultRow>> per_task(tasks.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task task = tasks[i];
      const SimulationConfig& cfg = configs[task.sweep_index];
      // Same seed for a realization index across sweep values.
      const std::uint64_t seed = derive_seed(spec.config.seed, task.realization);
      std::vector<ResultRow> rows;
      for (SolverKind kind : spec.solvers) {
        ResultRow row;
        row.sweep_index = task.sweep_index;
        row.sweep_value = spec.values.empty() ? std::string{} : spec.values[task.sweep_index];
        row.realization = task.realization;
        row.seed = seed;
        row.solver = solver_label(kind);
        const auto start = std::chrono::steady_clock::now();
        try {
          const auto realization = draw_realization(cfg, seed, spec.evaluate_finite);
          const auto pairing = optimal_pairing(cfg.l1, cfg.l2);
          CoefficientScale scale;
          scale.pl_cascaded = realization.pl_cascaded;
          scale.pl_direct = realization.pl_direct;
          scale.mt = cfg.mt;
          scale.mr = cfg.mr;
          scale.n = cfg.nx * cfg.ny;
          scale.noise_power = realization.noise_power;
          const auto problem = coefficients(realization.tx_ris.gains, realization.ris_rx.gains,
                                            realization.tx_rx.gains, pairing, scale, cfg.power_w);
          SolveConfig sc;
          sc.kind = kind;
          const Solution sol = solve(problem, sc);
          row.rate_asymptotic = sol.rate;
          row.rate_fixed_s1 = single_path_solution(problem).rate;
          row.active_cascaded = sol.active_r.size();
          row.active_direct = sol.active_d.size();
          row.s_min_star = sol.s_min_star;
          if (spec.evaluate_finite) {
            Rng psi_rng = Rng(seed).split(3);
            auto ev = adapt_solution(sol, problem, realization, pairing, cfg.ris_geometry(), cfg.tx_geometry(), psi_rng);
            if (spec.psi == PsiMode::Refine) ev = refine_common_phases(ev);
            row.rate_finite = ev.rate;
            row.reallocated = ev.reallocated;
          } else {
            row.rate_finite = std::nan("");
          }
        } catch (const std::exception& e) {
          row.status = std::string("error: ") + e.what();
          std::replace(row.status.begin(), row.status.end(), ',', ';');
          row.rate_asymptotic = row.rate_finite = row.rate_fixed_s1 = std::nan("");
        }
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        rows.push_back(std::move(row));
      }
      per_task[i] = std::move(rows);
    }
  };

  const std::size_t jobs = std::min(spec.jobs, std::max<std::size_t>(1, tasks.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentResult result;
  for (auto& rows : per_task)
    for (auto& row : rows) result.rows.push_back(std::move(row));
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.sweep_index != b.sweep_index) return a.sweep_index < b.sweep_index;
    return a.realization < b.realization;
  });

  std::map<std::pair<std::size_t, std::string>, SummaryRow> groups;
  const std::size_t smax = std::min(spec.config.l1, spec.config.l2);
  for (const auto& row : result.rows) {
    auto& g = groups[{row.sweep_index, row.solver}];
    if (g.rows == 0 && g.failures == 0) {
      g.sweep_index = row.sweep_index;
      g.sweep_value = row.sweep_value;
      g.solver = row.solver;
      g.cascaded_histogram.assign(smax + 1, 0);
      g.direct_histogram.assign(spec.config.l3 + 1, 0);
    }
    if (row.status != "ok") {
      ++g.failures;
      continue;
    }
    ++g.rows;
    g.mean_rate_asymptotic += row.rate_asymptotic;
    g.mean_rate_finite += row.rate_finite;
    g.mean_rate_fixed_s1 += row.rate_fixed_s1;
    g.mean_active_cascaded += static_cast<double>(row.active_cascaded);
    g.mean_active_direct += static_cast<double>(row.active_direct);
    g.cascaded_histogram.at(row.active_cascaded) += 1;
    g.direct_histogram.at(row.active_direct) += 1;
  }
  for (auto& [key, g] : groups) {
    if (g.rows) {
      const double n = static_cast<double>(g.rows);
      g.mean_rate_asymptotic /= n;
      g.mean_rate_finite /= n;
      g.mean_rate_fixed_s1 /= n;
      g.mean_active_cascaded /= n;
      g.mean_active_direct /= n;
    }
    result.summary.push_back(g);
  }
  return result;
}

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "sweep_index,sweep_value,realization,seed,solver,rate_asymptotic,rate_finite,rate_fixed_s1,"
         "active_cascaded,active_direct,s_min_star,reallocated,status\n";
  for (const auto& r : rows) {
    out << r.sweep_index << ',' << r.sweep_value << ',' << r.realization << ',' << r.seed << ',' << r.solver << ','
        << fmt(r.rate_asymptotic) << ',' << fmt(r.rate_finite) << ',' << fmt(r.rate_fixed_s1) << ','
        << r.active_cascaded << ',' << r.active_direct << ',' << r.s_min_star << ',' << (r.reallocated ? 1 : 0) << ','
        << r.status << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "sweep_index,sweep_value,solver,rows,failures,mean_rate_asymptotic,mean_rate_finite,mean_rate_fixed_s1,"
         "mean_active_cascaded,mean_active_direct,cascaded_histogram,direct_histogram\n";
  auto hist = [](const std::vector<std::size_t>& h) {
    std::string s;
    for (std::size_t i = 0; i < h.size(); ++i) s += (i ? ";" : "") + std::to_string(h[i]);
    return s;
  };
  for (const auto& g : summary) {
    out << g.sweep_index << ',' << g.sweep_value << ',' << g.solver << ',' << g.rows << ',' << g.failures << ','
        << fmt(g.mean_rate_asymptotic) << ',' << fmt(g.mean_rate_finite) << ',' << fmt(g.mean_rate_fixed_s1) << ','
        << fmt(g.mean_active_cascaded) << ',' << fmt(g.mean_active_direct) << ',' << hist(g.cascaded_histogram) << ','
        << hist(g.direct_histogram) << '\n';
  }
}

void write_timing_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "sweep_index,realization,solver,wall_ms\n";
  for (const auto& r : rows) out << r.sweep_index << ',' << r.realization << ',' << r.solver << ',' << fmt(r.wall_ms) << '\n';
}

void write_metadata_json(std::ostream& out, const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["tool"] = "rispart";
  j["git_describe"] = git_describe();
  std::ostringstream cfg;
  write_simulation_config(cfg, spec.config);
  j["config"] = cfg.str();
  j["sweep"] = to_string(spec.sweep);
  j["values"] = spec.values;
  if (spec.p0_w) j["P0_w"] = *spec.p0_w;
  std::vector<std::string> solvers;
  for (auto k : spec.solvers) solvers.emplace_back(solver_label(k));
  j["solvers"] = solvers;
  j["psi"] = to_string(spec.psi);
  j["finite"] = spec.evaluate_finite;
  j["rate_unit"] = "bit/s/Hz";
  j["notes"] = {
      "seed column: per-realization seed derived from the master seed; shared across sweep values",
      "reallocated=1: a sub-surface lost all columns in rounding and power was re-water-filled over surviving paths",
      "wall-clock times are in the .timing.csv file",
  };
  const std::string warnings = spec.config.resolution_warnings();
  if (!warnings.empty()) j["warnings"] = warnings;
  out << j.dump(2) << '\n';
}

void write_experiment_files(const ExperimentSpec& spec, const ExperimentResult& result) {
  if (spec.output.empty()) return;
  auto open = [](const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    return f;
  };
  {
    auto f = open(spec.output);
    write_rows_csv(f, result.rows);
  }
  {
    auto f = open(spec.output + ".summary.csv");
    write_summary_csv(f, result.summary);
  }
  {
    auto f = open(spec.output + ".timing.csv");
    write_timing_csv(f, result.rows);
  }
  {
    auto f = open(spec.output + ".meta.json");
    write_metadata_json(f, spec);
  }
}

std::string git_describe() { return RISPART_GIT_DESCRIBE; }

}  // namespace rispart
