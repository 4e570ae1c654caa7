// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "rispart/rng.hpp"

using namespace rispart;

TEST_CASE("splitmix64 matches the reference sequence") {
  // First output of the reference SplitMix64 generator seeded with 0.
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("engine is the standard mt19937_64") {
  Rng rng(5489);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.engine()();
  CHECK(x == 9981545732273789042ULL);
}

TEST_CASE("derived seeds differ per index and per master") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 4; ++m)
    for (std::uint64_t i = 0; i < 256; ++i) seen.insert(derive_seed(m, i));
  CHECK(seen.size() == 4 * 256);
}

TEST_CASE("split does not advance the parent") {
  Rng a(42), b(42);
  (void)a.split(3);
  CHECK(a.uniform() == b.uniform());
  CHECK(Rng(42).split(3).uniform() == Rng(42).split(3).uniform());
}

TEST_CASE("uniform ranges") {
  Rng rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    const double v = rng.uniform_open_closed();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
  }
}

TEST_CASE("complex normal has unit variance and independent halves") {
  Rng rng(11);
  constexpr int n = 200000;
  double power = 0.0, re2 = 0.0, cross = 0.0, mean_re = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = rng.complex_normal();
    power += std::norm(z);
    re2 += z.real() * z.real();
    cross += z.real() * z.imag();
    mean_re += z.real();
  }
  CHECK(power / n == Catch::Approx(1.0).margin(0.01));
  CHECK(re2 / n == Catch::Approx(0.5).margin(0.01));
  CHECK(std::abs(cross / n) < 0.01);
  CHECK(std::abs(mean_re / n) < 0.01);
}
