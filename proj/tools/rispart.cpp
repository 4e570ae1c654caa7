// SPDX-License-Identifier: Apache-2.0
//
// rispart command-line front end.
//
//   rispart simulate <spec.ini>  [--seed N] [--out file.csv] [--jobs N] [--solver grid|lm|both] [--psi random|refine]
//   rispart solve <problem.ini>  [--solver ...] [--out file.json]
//   rispart fig3 [--m a,b,c,d] [--snr lo:hi:step] [--out file.csv]
//   rispart verify <suite>       [--seed N]
//
// Exit codes: 0 success, 1 verification or numerical failure, 2 usage or config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rispart/config.hpp"
#include "rispart/experiment.hpp"
#include "rispart/fig3.hpp"
#include "rispart/solver.hpp"
#include "rispart/verify.hpp"

namespace {

using namespace rispart;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(what + ": '" + item + "' is not a number");
    }
  }
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

nlohmann::ordered_json to_json(const Solution& s) {
  nlohmann::ordered_json j;
  j["rate_bps_hz"] = s.rate;
  j["method"] = s.method;
  j["p_r"] = s.allocation.p_r;
  j["p_d"] = s.allocation.p_d;
  j["t"] = s.allocation.t;
  j["v"] = s.v;
  j["w"] = s.w;
  j["active_cascaded"] = s.active_r;
  j["active_direct"] = s.active_d;
  j["S_min_star"] = s.s_min_star;
  j["lm_converged"] = s.lm_converged;
  j["lm_iterations"] = s.lm_iterations;
  j["residual_norm"] = s.residual_norm;
  j["proportional_ok"] = s.proportional_ok;
  j["ordered_ok"] = s.ordered_ok;
  return j;
}

int run_simulate(const std::string& spec_path, std::optional<std::uint64_t> seed, const std::string& out,
                 std::optional<std::size_t> jobs, const std::string& solver, const std::string& psi) {
  ExperimentSpec spec = experiment_from(read_config_file(spec_path));
  if (seed) spec.config.seed = *seed;
  if (!out.empty()) spec.output = out;
  if (jobs) spec.jobs = *jobs;
  if (!solver.empty()) spec.solvers = parse_solver_selection(solver);
  if (!psi.empty()) spec.psi = parse_psi_mode(psi);
  spec.validate();

  const std::string warnings = spec.config.resolution_warnings();
  if (!warnings.empty()) std::cerr << warnings;

  const auto result = run_experiment(spec);
  if (spec.output.empty()) {
    write_rows_csv(std::cout, result.rows);
  } else {
    write_experiment_files(spec, result);
    write_summary_csv(std::cout, result.summary);
  }
  std::size_t failed = 0;
  for (const auto& row : result.rows)
    if (row.status != "ok") ++failed;
  if (failed) std::cerr << failed << " realization(s) flagged; see the status column\n";
  return kOk;
}

int run_solve(const std::string& path, const std::string& solver, const std::string& out) {
  const auto doc = read_config_file(path);
  std::vector<double> m_r, m_d;
  std::optional<double> power;
  for (const auto& [key, value] : doc) {
    if (key == "problem.m_r") m_r = parse_list(value, key);
    else if (key == "problem.m_d") m_d = parse_list(value, key);
    else if (key == "problem.P") power = parse_power_w(value);
    else throw ConfigError("problem file: unknown key '" + key + "'");
  }
  if (m_r.empty()) throw ConfigError("problem file: 'm_r' is required");
  if (!power) throw ConfigError("problem file: 'P' is required");
  const auto problem = make_problem(m_r, m_d, *power);

  SolveConfig cfg;
  if (solver.empty() || solver == "both") cfg.kind = SolverKind::Both;
  else if (solver == "grid") cfg.kind = SolverKind::Grid;
  else if (solver == "lm") cfg.kind = SolverKind::Lm;
  else throw UsageError("--solver expects grid, lm or both");
  const auto sol = solve(problem, cfg);

  // Report in the caller's input order.
  Solution mapped = sol;
  for (std::size_t s = 0; s < problem.cascaded(); ++s) {
    mapped.allocation.p_r[problem.perm_r[s]] = sol.allocation.p_r[s];
    mapped.allocation.t[problem.perm_r[s]] = sol.allocation.t[s];
  }
  for (std::size_t i = 0; i < problem.direct(); ++i) mapped.allocation.p_d[problem.perm_d[i]] = sol.allocation.p_d[i];
  for (auto& s : mapped.active_r) s = problem.perm_r[s];
  for (auto& i : mapped.active_d) i = problem.perm_d[i];
  std::sort(mapped.active_r.begin(), mapped.active_r.end());
  std::sort(mapped.active_d.begin(), mapped.active_d.end());

  emit(out, to_json(mapped).dump(2) + "\n");
  return kOk;
}

int run_fig3(const std::string& m_text, const std::string& snr_text, const std::string& out) {
  const auto m = parse_list(m_text, "--m");
  if (m.empty()) throw UsageError("--m needs at least one coefficient");
  const auto range = [&] {
    std::vector<double> r;
    std::stringstream ss(snr_text);
    std::string item;
    while (std::getline(ss, item, ':')) r.push_back(parse_list(item, "--snr").at(0));
    if (r.size() != 3 || !(r[2] > 0.0) || r[1] < r[0]) throw UsageError("--snr expects lo:hi:step with step > 0");
    return r;
  }();
  const auto report = fig3_regions(m, range[0], range[1], range[2]);

  std::ostringstream os;
  os << "snr_db,optimal_plus_count,rate";
  for (std::size_t k = 1; k <= m.size(); ++k) os << ",exists_" << k;
  for (std::size_t k = 1; k <= m.size(); ++k) os << ",t_" << k;
  os << '\n';
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return std::string(buf);
  };
  for (const auto& row : report.rows) {
    os << num(row.snr_db) << ',' << row.optimal << ',' << num(row.rate);
    for (bool e : row.exists) os << ',' << (e ? 1 : 0);
    for (double t : row.t) os << ',' << num(t);
    os << '\n';
  }
  emit(out, os.str());
  auto threshold = [&](const std::optional<double>& v) { return v ? num(*v) + " dB" : std::string("not reached"); };
  std::cerr << "all-plus pattern exists from " << threshold(report.existence_threshold_db) << ", optimal from "
            << threshold(report.optimality_threshold_db) << '\n';
  return kOk;
}

int run_verify_suite(const std::string& suite, std::uint64_t seed) {
  if (!is_verify_suite(suite)) {
    std::cerr << "error: unknown suite '" << suite << "' (expected lemmas, propositions, gains, solvers, finite or all)\n";
    return kUsage;
  }
  const auto report = run_verify(suite, seed);
  for (const auto& c : report.checks) {
    std::printf("%s  %-58s %7.2fs  %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.seconds, c.detail.c_str());
  }
  std::fflush(stdout);
  return report.passed() ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS partitioning and power allocation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rispart::git_describe());

  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> jobs;
  std::string solver;
  std::string psi;

  auto* sim = app.add_subcommand("simulate", "Run a Monte-Carlo experiment from a config file");
  std::string spec_path;
  sim->add_option("spec", spec_path, "Experiment config (INI)")->required()->check(CLI::ExistingFile);
  sim->add_option("--seed", seed, "Master seed (overrides [run] seed)");
  sim->add_option("--out", out, "Output CSV path; sidecars are written next to it");
  sim->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sim->add_option("--solver", solver, "grid, lm or both")->check(CLI::IsMember({"grid", "lm", "both"}));
  sim->add_option("--psi", psi, "random or refine")->check(CLI::IsMember({"random", "refine"}));

  auto* slv = app.add_subcommand("solve", "Solve one asymptotic rate problem");
  std::string problem_path;
  slv->add_option("problem", problem_path, "Problem file ([problem] m_r, m_d, P)")->required()->check(CLI::ExistingFile);
  slv->add_option("--solver", solver, "grid, lm or both")->check(CLI::IsMember({"grid", "lm", "both"}));
  slv->add_option("--out", out, "Output JSON path (default stdout)");

  auto* fig = app.add_subcommand("fig3", "Optimal partition pattern versus SNR under equal power");
  std::string m_text = "93,74,54,15";
  std::string snr_text = "-10:15:0.25";
  fig->add_option("--m", m_text, "Comma-separated coefficients, non-increasing");
  fig->add_option("--snr", snr_text, "SNR range lo:hi:step in dB");
  fig->add_option("--out", out, "Output CSV path (default stdout)");

  auto* ver = app.add_subcommand("verify", "Run a property/oracle suite");
  std::string suite;
  std::uint64_t verify_seed = 1;
  ver->add_option("suite", suite, "lemmas, propositions, gains, solvers, finite or all")->required();
  ver->add_option("--seed", verify_seed, "Seed for the randomized suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return run_simulate(spec_path, seed, out, jobs, solver, psi);
    if (*slv) return run_solve(problem_path, solver, out);
    if (*fig) return run_fig3(m_text, snr_text, out);
    if (*ver) return run_verify_suite(suite, verify_seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
