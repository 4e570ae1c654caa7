// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rispart/fig3.hpp"
#include "rispart/solver.hpp"
#include "rispart/verify.hpp"

using namespace rispart;
using Catch::Approx;

TEST_CASE("water filling examples") {
  const auto a = water_filling(std::vector<double>{2.0}, 1.0);
  CHECK(a.p[0] == Approx(1.0));
  CHECK(a.v == Approx(2.0 / 3.0));

  const auto b = water_filling(std::vector<double>{1.0, 1.0}, 2.0);
  CHECK(b.p[0] == Approx(1.0));
  CHECK(b.p[1] == Approx(1.0));

  const auto c = water_filling(std::vector<double>{4.0, 1.0}, 1.0);
  CHECK(c.p[0] == Approx(0.875));
  CHECK(c.p[1] == Approx(0.125));
  CHECK(c.v == Approx(8.0 / 9.0));

  // Weak channel below the water level gets nothing; input order is preserved.
  const auto d = water_filling(std::vector<double>{0.1, 10.0}, 1.0);
  CHECK(d.p[0] == 0.0);
  CHECK(d.p[1] == Approx(1.0));
}

TEST_CASE("water filling properties") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> m(1 + static_cast<std::size_t>(6 * rng.uniform()));
    for (auto& x : m) x = std::pow(10.0, 4 * rng.uniform() - 2);
    const double budget = std::pow(10.0, 2 * rng.uniform() - 1);
    const auto w = water_filling(m, budget);
    CHECK(std::accumulate(w.p.begin(), w.p.end(), 0.0) == Approx(budget).epsilon(1e-12));
    for (std::size_t k = 0; k < m.size(); ++k) {
      CHECK(w.p[k] >= 0.0);
      CHECK(w.p[k] == Approx(std::max(0.0, 1.0 / w.v - 1.0 / m[k])).margin(1e-12 * budget));
    }
  }
}

TEST_CASE("cubic roots") {
  const auto zero = cubic_roots(0.5, 0.0, 3.0);
  REQUIRE(zero.size() == 3);
  CHECK(zero[0].value == Approx(0.0).margin(1e-15));
  CHECK(zero[1].value == Approx(0.0).margin(1e-15));
  CHECK(zero[2].value == Approx(2.0));

  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    const double v = std::pow(10.0, 2 * rng.uniform() - 1);
    const double pr = std::pow(10.0, 2 * rng.uniform() - 1);
    const double m = std::pow(10.0, 4 * rng.uniform() - 1);
    const auto roots = cubic_roots(v, pr, m);
    REQUIRE(!roots.empty());
    const auto negatives = std::count_if(roots.begin(), roots.end(), [](const CubicRoot& r) { return r.value < 0; });
    CHECK(negatives == 1);
    for (const auto& r : roots) {
      const double p = r.value;
      const double scale = std::abs(p * p * p) + std::abs(p * p / v) + pr * pr / m;
      CHECK(std::abs(p * p * p - p * p / v + pr * pr / m) <= 1e-9 * scale);
    }
    CHECK(std::is_sorted(roots.begin(), roots.end(),
                         [](const CubicRoot& a, const CubicRoot& b) { return a.value < b.value; }));
  }
}

TEST_CASE("fixed-power partition problem") {
  const auto sym = solve_p32(std::vector<double>{16.0, 16.0});
  CHECK(sym.t[0] == Approx(0.5));
  CHECK(sym.t[1] == Approx(0.5));
  CHECK(sym.rate > std::log2(17.0));

  const auto skew = solve_p32(std::vector<double>{3.0, 2.0});
  CHECK(skew.t == std::vector<double>{1.0, 0.0});
  CHECK(skew.plus_count == 1);

  const auto m8 = scaled_coefficients(std::vector<double>{93, 74, 54, 15}, 8.0);
  const auto r8 = solve_p32(m8);
  CHECK(r8.plus_count == 4);
  CHECK(std::accumulate(r8.t.begin(), r8.t.end(), 0.0) == Approx(1.0));
  CHECK(std::is_sorted(r8.t.rbegin(), r8.t.rend()));

  const auto low = solve_p32(scaled_coefficients(std::vector<double>{93, 74, 54, 15}, -10.0));
  CHECK(low.t == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("pattern partition solutions sum to one") {
  const std::vector<double> m{50.0, 40.0, 30.0};
  const Pattern pp{Label::Plus, Label::Plus, Label::Zero};
  for (double w : pattern_solutions(m, pp)) {
    const auto t = pattern_partition(m, pp, w);
    CHECK(t[0] + t[1] + t[2] == Approx(1.0).epsilon(1e-12));
    CHECK(t[2] == 0.0);
  }
}

TEST_CASE("search bounds") {
  const std::vector<double> md{1.0};
  const auto [bl, bu1] = search_bounds(1, 1, std::vector<double>{4.0, 4.0}, md, 1.0);
  CHECK(bl == Approx(0.5));
  (void)bu1;
  const auto [bl2, bu] = search_bounds(2, 1, std::vector<double>{4.0, 4.0}, md, 1.0);
  CHECK(bu == Approx(1.0));
  (void)bl2;
  const auto big = search_bounds(2, 1, std::vector<double>{4.0, 4.0}, md, 1e12);
  CHECK(big.first < 1e-11);
}

TEST_CASE("grid search and LM") {
  SECTION("single cascaded path takes everything") {
    const auto p = make_problem({25.0}, {}, 2.0);
    const auto g = grid_search(p);
    CHECK(g.allocation.p_r[0] == Approx(2.0));
    CHECK(g.allocation.t[0] == Approx(1.0));
    const auto lm = lm_solve(p, 1, 0, Allocation{{1.0}, {}, {1.0}});
    CHECK(lm.converged);
    CHECK(lm.solution.allocation.p_r[0] == 2.0);
    CHECK(lm.solution.allocation.t[0] == 1.0);
    CHECK(lm.solution.rate == Approx(std::log2(51.0)));

    // Analytic single-path solution: v = 1/(P + 1/m), w = 2 v P.
    Solution exact;
    exact.allocation = Allocation{{2.0}, {}, {1.0}};
    exact.v = 1.0 / (2.0 + 1.0 / 25.0);
    exact.w = 2.0 * exact.v * 2.0;
    finalize_solution(p, exact);
    CHECK(kkt_residual(p, exact).max_abs() < 1e-12);

    auto bumped = exact;
    bumped.allocation.p_r[0] += 0.1;
    const double r1 = kkt_residual(p, bumped).max_stationarity();
    bumped.allocation.p_r[0] += 0.1;
    const double r2 = kkt_residual(p, bumped).max_stationarity();
    CHECK(r1 > 1e-4);
    CHECK(r2 > r1);
  }

  SECTION("degenerate cascaded channel falls back to direct water filling") {
    const auto p = make_problem({1e-12}, {50.0, 5.0}, 1.0);
    const auto g = grid_search(p);
    const auto wf = water_filling(p.m_d, 1.0);
    CHECK(g.allocation.p_d[0] == Approx(wf.p[0]).margin(1e-6));
    CHECK(g.allocation.p_d[1] == Approx(wf.p[1]).margin(1e-6));
  }

  SECTION("symmetric paths at high power spread evenly") {
    const auto p = make_problem({100.0, 100.0, 100.0}, {}, 1000.0);
    const auto s = solve(p);
    for (double t : s.allocation.t) CHECK(t == Approx(1.0 / 3.0).epsilon(1e-6));
  }

  SECTION("one dominant path at low power") {
    const auto p = make_problem({100.0, 1.0, 0.5}, {}, 0.01);
    const auto s = solve(p);
    CHECK(s.allocation.t[0] == Approx(1.0));
    CHECK(s.allocation.t[1] == 0.0);
    CHECK(s.active_r.size() == 1);
  }

  SECTION("warm-started LM converges quickly") {
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
      const auto p = random_problem(rng, 3, 2);
      const auto g = grid_search(p);
      const auto lm = lm_solve(p, g.active_r.size(), g.active_d.size(), g.allocation,
                               std::pair<double, double>{g.v, g.w});
      if (!lm.converged) continue;
      CHECK(lm.iterations <= 5);
      CHECK(lm.solution.rate >= g.rate * (1 - 1e-6));
    }
  }
}

TEST_CASE("solve respects the budget exactly") {
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_problem(rng, 4, 3);
    const auto s = solve(p);
    double total = 0.0;
    for (double x : s.allocation.p_r) total += x;
    for (double x : s.allocation.p_d) total += x;
    CHECK(total == Approx(p.power).epsilon(1e-9));
    CHECK(std::accumulate(s.allocation.t.begin(), s.allocation.t.end(), 0.0) == Approx(1.0).epsilon(1e-9));
    CHECK(s.rate >= single_path_solution(p).rate * (1 - 1e-9));
    CHECK(s.proportional_ok);
    CHECK(s.ordered_ok);
  }
}
