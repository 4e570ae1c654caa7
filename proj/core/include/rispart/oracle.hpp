// SPDX-License-Identifier: Apache-2.0
//
// Brute-force references for desk-scale verification.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "rispart/asymptotic.hpp"
#include "rispart/finite.hpp"

namespace rispart {

struct GridSpec {
  std::size_t t_resolution = 60;   // t_s in multiples of 1/R_t
  std::size_t p_resolution = 240;  // p_i in multiples of P/R_p
  void validate() const;
};

struct OracleResult {
  double rate = 0.0;
  Allocation allocation;
};

/// Maximum of the asymptotic rate over the joint barycentric lattice.
/// Guard: at most 3 cascaded and 2 direct paths.
OracleResult brute_force_p3(const AsymptoticProblem& problem, const GridSpec& grid = {});

/// Allocation moved onto the lattice: each coordinate floored, leftover added to the largest.
Allocation lattice_round(const Allocation& allocation, double power, const GridSpec& grid);

/// rate(allocation) - rate(lattice_round(allocation)); how much a lattice can lose against a point.
double resolution_bound(const AsymptoticProblem& problem, const Allocation& allocation, const GridSpec& grid);

struct PairingRate {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double rate = 0.0;
  bool sorted = false;  // identity-prefix pairing
};

using ProblemSolver = std::function<double(const AsymptoticProblem&)>;

/// Solves every injective pairing of size min(L1, L2); result sorted by rate, best first.
std::vector<PairingRate> enumerate_pairings(std::span<const cd> alpha, std::span<const cd> beta,
                                            std::span<const cd> gamma, const CoefficientScale& scale, double power,
                                            const ProblemSolver& solver);

struct PsiResult {
  std::vector<double> psi;
  double rate = 0.0;
};

/// Full grid over psi in [0, 2 pi)^S, anchored at the current psi. Guard: S <= 2.
PsiResult exhaustive_psi(const FiniteEvaluation& evaluation, std::size_t grid_points);

}  // namespace rispart
