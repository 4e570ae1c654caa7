// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>

#include "rispart/experiment.hpp"
#include "rispart/finite.hpp"
#include "rispart/oracle.hpp"
#include "rispart/solver.hpp"
#include "rispart/verify.hpp"

using namespace rispart;
using Catch::Approx;

TEST_CASE("brute force on trivial instances") {
  const auto one = make_problem({7.0}, {}, 3.0);
  const auto r = brute_force_p3(one);
  CHECK(r.rate == Approx(std::log2(1.0 + 21.0)));
  CHECK(r.allocation.t[0] == Approx(1.0));
  CHECK(r.allocation.p_r[0] == Approx(3.0));

  const auto sym = brute_force_p3(make_problem({16.0, 16.0}, {}, 100.0));
  CHECK(sym.allocation.t[0] == Approx(0.5));
  CHECK(sym.allocation.t[1] == Approx(0.5));

  CHECK_THROWS(brute_force_p3(make_problem({1, 1, 1, 1}, {}, 1.0)));
  CHECK_THROWS(brute_force_p3(make_problem({1}, {1, 1, 1}, 1.0)));
  CHECK_THROWS(brute_force_p3(one, GridSpec{0, 10}));
}

TEST_CASE("lattice rounding stays feasible") {
  const GridSpec grid{10, 20};
  const Allocation a{{0.33, 0.21}, {0.46}, {0.71, 0.29}};
  const auto r = lattice_round(a, 1.0, grid);
  double total = 0.0;
  for (double x : r.p_r) total += x;
  for (double x : r.p_d) total += x;
  CHECK(total == Approx(1.0));
  CHECK(r.t[0] + r.t[1] == Approx(1.0));
  for (double x : r.t) CHECK(std::abs(x * 10 - std::round(x * 10)) < 1e-12);
}

TEST_CASE("grid search stays close to brute force") {
  Rng rng(31);
  for (int i = 0; i < 10; ++i) {
    const auto p = random_problem(rng, 2, 1);
    const auto o = brute_force_p3(p, GridSpec{40, 160});
    CHECK(grid_search(p).rate >= o.rate * (1 - 1e-3));
  }
}

TEST_CASE("pairing enumeration") {
  CoefficientScale scale;
  scale.pl_cascaded = 1.0;
  scale.pl_direct = 1.0;
  const auto solver = [](const AsymptoticProblem& p) { return solve(p).rate; };
  const std::vector<cd> one{cd(1, 0)};
  const auto single = enumerate_pairings(one, one, {}, scale, 1.0, solver);
  REQUIRE(single.size() == 1);
  CHECK(single[0].sorted);

  const std::vector<cd> a{cd(2, 0), cd(1, 0)};
  const std::vector<cd> b{cd(1.5, 0), cd(0.5, 0)};
  const auto table = enumerate_pairings(a, b, {}, scale, 1.0, solver);
  REQUIRE(table.size() == 2);
  CHECK(table[0].sorted);
  CHECK(table[0].rate >= table[1].rate);
}

TEST_CASE("exhaustive psi") {
  SimulationConfig cfg;
  cfg.mt = cfg.mr = 16;
  cfg.nx = 10;
  cfg.ny = 30;
  cfg.l1 = 2;
  cfg.l2 = 2;
  cfg.l3 = 1;
  const auto ch = draw_realization(cfg, 77);
  const auto pairing = optimal_pairing(2, 2);
  const auto problem = coefficients(ch, pairing, cfg.power_w);
  const auto sol = solve(problem);
  Rng rng(4);
  const auto ev = adapt_solution(sol, problem, ch, pairing, cfg.ris_geometry(), cfg.tx_geometry(), rng);
  REQUIRE(ev.plan.size() <= 2);

  const auto same = exhaustive_psi(ev, 1);
  CHECK(same.psi == ev.plan.psi);
  CHECK(same.rate == Approx(ev.rate));

  const auto best = exhaustive_psi(ev, 16);
  CHECK(best.rate >= ev.rate - 1e-12);
  CHECK_THROWS(exhaustive_psi(ev, 0));
}
