// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rispart/partition.hpp"

using namespace rispart;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

RisGeometry ris(std::size_t nx, std::size_t ny) { return RisGeometry{nx, ny, 0.5, 1.0}; }

PartitionPlan two_block_plan() {
  PartitionPlan p;
  p.column_counts = {2, 4};
  p.t = {2.0 / 6.0, 4.0 / 6.0};
  p.gradients = {PhaseGradient{0.3, -0.7, 0, 0}, PhaseGradient{-1.1, 0.45, 1, 1}};
  p.psi = {0.4, 5.1};
  return p;
}

}  // namespace

TEST_CASE("phase gradients from path directions") {
  const Direction d{0.6, 1.9};
  const auto same = gradient_for(d, d);
  CHECK(same.gx == 0.0);
  CHECK(same.gy == 0.0);

  const auto g = gradient_for(Direction{kPi / 2, 0.0}, Direction{kPi / 2, kPi / 2});
  CHECK(g.gx == Approx(-1.0).margin(1e-15));
  CHECK(g.gy == Approx(1.0).margin(1e-15));
}

TEST_CASE("feasible gradient table") {
  Rng rng(8);
  const auto tx = sample_paths(rng, 3, Hop::TxRis);
  const auto rx = sample_paths(rng, 4, Hop::RisRx);
  const auto table = feasible_gradients(tx, rx);
  CHECK(table.entries.size() == 12);
  CHECK(table.duplicates.empty());
  const auto& e = table.at(2, 3);
  CHECK(e.u == 2);
  CHECK(e.v == 3);
  CHECK(e.gx == rx.ris_departure[3].cos_x() - tx.ris_arrival[2].cos_x());

  // Two identical arrival directions give coinciding gradients.
  auto tx2 = tx;
  tx2.ris_arrival[1] = tx2.ris_arrival[0];
  CHECK_FALSE(feasible_gradients(tx2, rx).duplicates.empty());
}

TEST_CASE("pairing matrix validity") {
  CHECK_NOTHROW(PairingMatrix(2, 3, {1, 0, 0, 0, 0, 1}));
  CHECK_THROWS(PairingMatrix(2, 3, {1, 1, 0, 0, 0, 0}));
  CHECK_THROWS(PairingMatrix(2, 2, {1, 0, 1, 0}));
  CHECK_THROWS(PairingMatrix(2, 2, {2, 0, 0, 0}));
  CHECK_THROWS(PairingMatrix(2, 2, {1, 0, 0}));

  const auto b = PairingMatrix::identity_prefix(2, 3);
  CHECK(b(0, 0) == 1);
  CHECK(b(1, 1) == 1);
  CHECK(b(0, 1) == 0);
  CHECK(b.ones() == 2);
  const auto bt = PairingMatrix::identity_prefix(3, 2);
  CHECK(bt.ones() == 2);
  CHECK(bt(2, 0) == 0);

  const auto p = PairingMatrix::from_pairs(3, 3, {{2, 0}, {0, 1}});
  CHECK(p.pairs() == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {2, 0}});
  CHECK_THROWS(PairingMatrix::from_pairs(3, 3, {{0, 0}, {0, 1}}));
}

TEST_CASE("plan validation") {
  auto p = two_block_plan();
  CHECK_NOTHROW(p.validate(6));
  CHECK_THROWS(p.validate(7));
  p.psi[0] = 2 * kPi;
  CHECK_THROWS(p.validate(6));
  p = two_block_plan();
  p.t = {0.5, 0.6};
  CHECK_THROWS(p.validate(6));
  CHECK(two_block_plan().prefix_columns() == std::vector<std::size_t>{0, 2, 6});
  CHECK(two_block_plan().pairing(2, 2).ones() == 2);
}

TEST_CASE("plan record round-trips") {
  const auto p = two_block_plan();
  const auto back = parse_plan(serialize_plan(p));
  CHECK(back.t == p.t);
  CHECK(back.column_counts == p.column_counts);
  CHECK(back.psi == p.psi);
  REQUIRE(back.gradients.size() == 2);
  CHECK(back.gradients[1].gx == p.gradients[1].gx);
  CHECK(back.gradients[1].u == 1);
  CHECK_THROWS(parse_plan("S = 2\nt = 1\n"));
}

TEST_CASE("dirichlet ratio") {
  CHECK(dirichlet_ratio(7, 0.0) == 1.0);
  CHECK(dirichlet_ratio(7, 1e-12) == 1.0);
  CHECK(dirichlet_ratio(4, kPi) == Approx(-1.0));  // (-1)^(K-1)
  CHECK(dirichlet_ratio(5, kPi) == Approx(1.0));
  CHECK(dirichlet_ratio(5, 0.3) == Approx(std::sin(1.5) / (5 * std::sin(0.3))).epsilon(1e-14));
  CHECK(std::abs(dirichlet_ratio(6, kPi / 6)) < 1e-15);
  CHECK(dirichlet_ratio(1, 2.2) == Approx(1.0));
}

TEST_CASE("build_theta element phases") {
  PartitionPlan single;
  single.t = {1.0};
  single.column_counts = {1};
  single.gradients = {PhaseGradient{0.9, -0.2, 0, 0}};
  single.psi = {0.7};
  const auto one = build_theta(single, ris(1, 1));
  CHECK(std::abs(one[0] - std::polar(1.0, 0.7)) < 1e-15);

  PartitionPlan flat = single;
  flat.column_counts = {5};
  flat.gradients[0] = PhaseGradient{};
  flat.psi = {0.0};
  for (const auto& x : build_theta(flat, ris(3, 5))) CHECK(std::abs(x - 1.0) < 1e-15);

  // Element-wise evaluation: sub-surface 0 owns columns 0..1, sub-surface 1 columns 2..5.
  const auto p = two_block_plan();
  const auto g = ris(4, 6);
  const auto theta = build_theta(p, g);
  const double k = kPi;  // 2 pi d / lambda with d = lambda / 2
  for (std::size_t ix = 0; ix < 4; ++ix) {
    for (std::size_t iy = 0; iy < 6; ++iy) {
      const std::size_t s = iy < 2 ? 0 : 1;
      const double phase = p.psi[s] + k * (ix * p.gradients[s].gx + iy * p.gradients[s].gy);
      CHECK(std::abs(theta[g.flat_index(ix, iy)] - std::polar(1.0, phase)) < 1e-13);
      CHECK(std::abs(theta[g.flat_index(ix, iy)]) == Approx(1.0));
    }
  }
}

TEST_CASE("direct-sum gain basics") {
  const auto g = ris(3, 4);
  std::vector<cd> ones(12, cd(1.0, 0.0));
  CHECK(std::abs(gain_direct_sum(ones, g, PhaseGradient{}) - 1.0) < 1e-15);
  std::vector<cd> th{std::polar(1.0, 1.3)};
  CHECK(std::abs(gain_direct_sum(th, ris(1, 1), PhaseGradient{0.4, 0.2, 0, 0}) - th[0]) < 1e-15);
}

TEST_CASE("closed-form gain") {
  const auto g = ris(8, 8);
  auto p = two_block_plan();
  p.column_counts = {3, 5};
  p.t = {3.0 / 8.0, 5.0 / 8.0};

  // Random probe directions against the direct-sum oracle.
  Rng rng(21);
  const auto theta = build_theta(p, g);
  for (int i = 0; i < 20; ++i) {
    const PhaseGradient z{4 * rng.uniform() - 2, 4 * rng.uniform() - 2, 0, 0};
    CHECK(std::abs(gain_closed_form(p, g, z) - gain_direct_sum(theta, g, z)) < 1e-10);
  }

  // Aligned single sub-surface: ratios are 1 and psi_tilde reduces to psi.
  PartitionPlan one;
  one.t = {1.0};
  one.column_counts = {8};
  one.gradients = {PhaseGradient{0.2, 0.5, 0, 0}};
  one.psi = {1.1};
  CHECK(std::abs(gain_closed_form(one, g, one.gradients[0]) - std::polar(1.0, 1.1)) < 1e-14);

  // (k/2) Ny eta_y = pi with Ny even puts the y-ratio on a Dirichlet zero.
  const double eta_y = 2.0 / 8.0;
  const PhaseGradient z{0.2, 0.5 - eta_y, 0, 0};
  CHECK(std::abs(gain_closed_form(one, g, z)) < 1e-14);
}

TEST_CASE("asymptotic gain") {
  PartitionPlan p;
  p.t = {0.3, 0.7};
  p.column_counts = {};
  p.gradients = {PhaseGradient{0.1, 0.1, 0, 0}, PhaseGradient{0.2, 0.3, 1, 1}};
  p.psi = {0.0, 0.0};
  CHECK(std::abs(gain_asymptotic(p, 0, 0) - 0.3) < 1e-15);
  CHECK(std::abs(gain_asymptotic(p, 0, 1)) == 0.0);
  p.psi[0] = kPi / 2;
  CHECK(std::abs(gain_asymptotic(p, 0, 0) - cd(0.0, 0.3)) < 1e-15);
}

TEST_CASE("largest-remainder rounding") {
  CHECK(round_partition(std::vector<double>{0.5, 0.5}, 90).counts == std::vector<std::size_t>{45, 45});
  const double third = 1.0 / 3.0;
  CHECK(round_partition(std::vector<double>{third, third, third}, 10).counts == std::vector<std::size_t>{4, 3, 3});
  const auto r = round_partition(std::vector<double>{0.96, 0.04}, 10);
  CHECK(r.counts == std::vector<std::size_t>{10, 0});
  CHECK(r.dropped == std::vector<std::size_t>{1});
  CHECK(r.reapportioned);
  CHECK(round_partition(std::vector<double>{0.0, 1.0}, 3).counts == std::vector<std::size_t>{0, 3});
  CHECK(round_partition(std::vector<double>{0.0, 1.0}, 3).dropped.empty());
  CHECK_THROWS(round_partition(std::vector<double>{0.5, 0.6}, 10));
}

TEST_CASE("tile plans") {
  const auto g = ris(16, 16);
  // One sub-surface owns every tile.
  const auto all = make_tile_plan(g, 0.5, std::vector<std::size_t>(16, 0), {PhaseGradient{0.3, 0.1, 0, 0}}, {0.0});
  CHECK(std::abs(tile_plan_gain_asymptotic(all, 0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(tile_plan_gain(all, g, all.gradients[0])) == Approx(1.0));

  // Two rectangular blocks of 8 tiles each.
  std::vector<std::size_t> owner(16);
  for (std::size_t mx = 0; mx < 4; ++mx)
    for (std::size_t my = 0; my < 4; ++my) owner[mx * 4 + my] = mx < 2 ? 0 : 1;
  const auto two =
      make_tile_plan(g, 0.5, owner, {PhaseGradient{0.3, 0.1, 0, 0}, PhaseGradient{-0.4, 0.6, 1, 1}}, {0.0, 0.0});
  CHECK(two.mu() == std::vector<double>{0.5, 0.5});
  CHECK(std::abs(tile_plan_gain_asymptotic(two, 0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(tile_plan_gain_asymptotic(two, 1, 1) - 0.5) < 1e-15);

  // Stripes reproduce the horizontal partition exactly.
  PartitionPlan p;
  p.column_counts = {4, 12};
  p.t = {0.25, 0.75};
  p.gradients = {PhaseGradient{0.3, 0.1, 0, 0}, PhaseGradient{-0.4, 0.6, 1, 1}};
  p.psi = {0.9, 4.0};
  const auto tiles = tile_plan_from_partition(p, g, 0.5);
  const auto t1 = build_theta(tiles, g);
  const auto t2 = build_theta(p, g);
  for (std::size_t n = 0; n < t1.size(); ++n) CHECK(std::abs(t1[n] - t2[n]) < 1e-12);
  for (const auto& z : p.gradients) CHECK(std::abs(tile_plan_gain(tiles, g, z) - gain_closed_form(p, g, z)) < 1e-10);

  CHECK_THROWS(make_tile_plan(ris(15, 16), 0.5, owner, p.gradients, p.psi));
  p.column_counts = {3, 13};
  p.t = {3.0 / 16, 13.0 / 16};
  CHECK_THROWS(tile_plan_from_partition(p, g, 0.5));
  CHECK_THROWS(make_tile_plan(g, 0.5, std::vector<std::size_t>(15, 0), {PhaseGradient{}}, {0.0}));
}
