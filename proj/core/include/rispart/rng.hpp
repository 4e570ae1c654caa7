// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random streams for Monte-Carlo runs.
//
// Every realization owns its own std::mt19937_64 whose seed is derived from
// (master seed, stream index) with the SplitMix64 finalizer. The engine
// sequence is fixed by the C++ standard; the floating-point conversions
// below are done by hand so draws are bit-identical across standard
// libraries.

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace rispart {

/// SplitMix64 finalizer (Steele, Lea & Flood). Constants:
/// increment 0x9E3779B97F4A7C15, multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for child stream `index` of `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Child generator keyed on the construction seed; does not advance this one.
  Rng split(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }

  /// Uniform on (0, 1], 53-bit resolution.
  double uniform_open_closed();
  /// Uniform on [0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal via Box-Muller; the sine branch is cached for the next call.
  double normal();
  /// CN(0, 1): independent N(0, 1/2) real and imaginary parts.
  std::complex<double> complex_normal();

  std::mt19937_64& engine() noexcept { return engine_; }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace rispart
