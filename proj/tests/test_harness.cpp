// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rispart/experiment.hpp"
#include "rispart/fig3.hpp"

using namespace rispart;
using Catch::Approx;

namespace {

ExperimentSpec parse(const std::string& text) {
  std::istringstream in(text);
  return experiment_from(read_config_document(in));
}

const char* kSmall = R"(
[system]
M = 8
N = 6x12
L1 = 3
L2 = 3
L3 = 2
[run]
realizations = 3
seed = 99
[experiment]
sweep = P
values = 10 dBm, 30 dBm
solver = both
)";

std::string csv(const ExperimentResult& r) {
  std::ostringstream os;
  write_rows_csv(os, r.rows);
  return os.str();
}

}  // namespace

TEST_CASE("experiment section parsing") {
  const auto spec = parse(kSmall);
  CHECK(spec.sweep == SweepVariable::P);
  CHECK(spec.values == std::vector<std::string>{"10 dBm", "30 dBm"});
  CHECK(spec.solvers == std::vector<SolverKind>{SolverKind::Grid, SolverKind::Lm});
  CHECK(spec.psi == PsiMode::Random);
  CHECK(spec.evaluate_finite);
  CHECK(spec.config_for(0).power_w == Approx(0.01));
  CHECK(spec.config_for(1).power_w == Approx(1.0));

  const auto m = parse("[experiment]\nsweep = M\nvalues = 16, 64\nP0 = 60.1030 dBm\nfinite = false\n");
  CHECK(m.config_for(0).mt == 16);
  CHECK(m.config_for(1).mr == 64);
  CHECK(m.config_for(0).power_w * 256 == Approx(std::pow(10.0, 6.01030 - 3.0)));
  CHECK_FALSE(m.evaluate_finite);

  const auto n = parse("[experiment]\nsweep = N\nvalues = 30x30, 30x90\n");
  CHECK(n.config_for(0).ny == 30);
  CHECK(n.config_for(1).ny == 90);

  const auto snr = parse("[experiment]\nsweep = SNR\nvalues = 100\n");
  CHECK(snr.config_for(0).power_w == Approx(snr.config.noise_power_w * 1e10));

  CHECK(parse("[system]\nM = 4\n").sweep == SweepVariable::None);
  CHECK(parse("[system]\nM = 4\n").sweep_size() == 1);
}

TEST_CASE("experiment section errors") {
  CHECK_THROWS_AS(parse("[experiment]\nsweeep = N\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nsweep = K\nvalues = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nsweep = N\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nsweep = P\nvalues = 1 W\nP0 = 60 dBm\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nsolver = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\npsi = best\n"), ConfigError);
  CHECK_THROWS_AS(parse("[extra]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("x = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nsweep = N\nvalues = 31x\n"), ConfigError);
}

TEST_CASE("runs are deterministic and independent of worker count") {
  auto spec = parse(kSmall);
  const auto a = run_experiment(spec);
  const auto b = run_experiment(spec);
  spec.jobs = 3;
  const auto c = run_experiment(spec);
  CHECK(csv(a) == csv(b));
  CHECK(csv(a) == csv(c));

  // 2 sweep values x 3 realizations x 2 solvers.
  REQUIRE(a.rows.size() == 12);
  for (const auto& row : a.rows) {
    CHECK(row.status == "ok");
    CHECK(row.rate_asymptotic >= 0.0);
    CHECK(row.rate_finite >= 0.0);
    CHECK(row.active_cascaded <= 3);
    CHECK(row.active_direct <= 2);
  }
  // Common random numbers across sweep values.
  CHECK(a.rows[0].seed == a.rows[6].seed);
  CHECK(a.rows[0].seed != a.rows[2].seed);

  spec.config.seed = 100;
  CHECK(csv(run_experiment(spec)) != csv(a));
}

TEST_CASE("csv schema and summary") {
  const auto r = run_experiment(parse(kSmall));
  const std::string text = csv(r);
  const std::string header = text.substr(0, text.find('\n'));
  CHECK(header ==
        "sweep_index,sweep_value,realization,seed,solver,rate_asymptotic,rate_finite,rate_fixed_s1,"
        "active_cascaded,active_direct,s_min_star,reallocated,status");
  std::istringstream lines(text);
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 12);
    ++count;
  }
  CHECK(count == 13);

  REQUIRE(r.summary.size() == 4);
  for (const auto& s : r.summary) {
    CHECK(s.rows == 3);
    CHECK(s.failures == 0);
    std::size_t h = 0;
    for (auto x : s.cascaded_histogram) h += x;
    CHECK(h == 3);
  }

  ResultRow bad;
  bad.status = "error: singular; matrix";
  bad.rate_asymptotic = std::nan("");
  std::ostringstream os;
  write_rows_csv(os, {bad});
  CHECK(os.str().find("error: singular; matrix") != std::string::npos);
}

TEST_CASE("output files and metadata") {
  const auto dir = std::filesystem::temp_directory_path() / "rispart_test_harness";
  std::filesystem::create_directories(dir);
  auto spec = parse(kSmall);
  spec.output = (dir / "run.csv").string();
  write_experiment_files(spec, run_experiment(spec));
  for (const char* suffix : {"", ".summary.csv", ".timing.csv", ".meta.json"})
    CHECK(std::filesystem::exists(spec.output + suffix));
  std::ifstream meta(spec.output + ".meta.json");
  const auto j = nlohmann::json::parse(meta);
  CHECK(j.contains("git_describe"));
  CHECK(j.contains("config"));
  CHECK(j["sweep"] == "P");
  std::ifstream rows(spec.output);
  std::stringstream buf;
  buf << rows.rdbuf();
  CHECK(buf.str().find("wall") == std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("partition pattern region map") {
  const std::vector<double> m{93, 74, 54, 15};
  const auto rep = fig3_regions(m, -10.0, 15.0, 0.5);
  REQUIRE(rep.existence_threshold_db);
  REQUIRE(rep.optimality_threshold_db);
  CHECK(*rep.existence_threshold_db == Approx(4.71).margin(0.1));
  CHECK(*rep.optimality_threshold_db == Approx(6.43).margin(0.1));
  CHECK(rep.rows.front().t == std::vector<double>{1.0, 0.0, 0.0, 0.0});
  CHECK(rep.rows.front().optimal == 1);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].optimal >= rep.rows[i - 1].optimal);
  CHECK(rep.rows.back().optimal == 4);

  // Uniform coefficients: the all-plus pattern (t = 1/4) exists once m_tilde >= 16, but at
  // m_tilde = 16 one path still wins (log2 17 > 4). Optimality starts where the even 4-way
  // split overtakes the even 3-way split: 4 log2(1 + m/16) = 3 log2(1 + m/9), m = 47.2216.
  const auto uni = fig3_regions(std::vector<double>{50, 50, 50, 50}, -10.0, 15.0, 0.5);
  REQUIRE(uni.existence_threshold_db);
  REQUIRE(uni.optimality_threshold_db);
  CHECK(*uni.existence_threshold_db == Approx(10.0 * std::log10(16.0 / 50.0)).margin(1e-5));
  CHECK(*uni.optimality_threshold_db == Approx(-0.2482914717).margin(1e-5));
  const double m_opt = 50.0 * std::pow(10.0, *uni.optimality_threshold_db / 10.0);
  CHECK(4.0 * std::log2(1.0 + m_opt / 16.0) == Approx(3.0 * std::log2(1.0 + m_opt / 9.0)).margin(1e-4));
}

TEST_CASE("skipping finite evaluation leaves asymptotic results unchanged") {
  auto spec = parse(kSmall);
  const auto full = run_experiment(spec);
  spec.evaluate_finite = false;
  const auto fast = run_experiment(spec);
  REQUIRE(full.rows.size() == fast.rows.size());
  for (std::size_t i = 0; i < full.rows.size(); ++i) {
    CHECK(fast.rows[i].rate_asymptotic == full.rows[i].rate_asymptotic);
    CHECK(fast.rows[i].active_cascaded == full.rows[i].active_cascaded);
    CHECK(fast.rows[i].active_direct == full.rows[i].active_direct);
    CHECK(std::isnan(fast.rows[i].rate_finite));
  }
}
