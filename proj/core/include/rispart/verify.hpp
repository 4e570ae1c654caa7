// SPDX-License-Identifier: Apache-2.0
//
// Property and oracle suites behind `rispart verify`. Every check runs on a
// fixed seed; thresholds are arguments so callers can pin their own.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rispart/asymptotic.hpp"
#include "rispart/rng.hpp"

namespace rispart {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// lemmas, propositions, gains, solvers, finite, all.
const std::vector<std::string>& verify_suite_names();
bool is_verify_suite(const std::string& name);
/// Throws std::invalid_argument for an unknown suite.
VerifyReport run_verify(const std::string& suite, std::uint64_t seed = 1);

/// Random sorted problem with 1..max_cascaded cascaded and 0..max_direct direct
/// coefficients, log-uniform over [1, 10^decades], P = 1.
AsymptoticProblem random_problem(Rng& rng, std::size_t max_cascaded, std::size_t max_direct, double decades = 3.0);

// gains
CheckResult check_response_norms(std::uint64_t seed);
CheckResult check_orthogonality_bound(std::uint64_t seed);
CheckResult check_channel_rank(std::uint64_t seed);
CheckResult check_gain_identity(std::size_t plans, double tolerance, std::uint64_t seed);
CheckResult check_gain_magnitude(std::size_t plans, std::uint64_t seed);
CheckResult check_gain_convergence(std::size_t plans, std::uint64_t seed);
CheckResult check_asymptotic_gain_permutation(std::size_t plans, std::uint64_t seed);
CheckResult check_tile_equivalence(std::size_t cases, double tolerance, std::uint64_t seed);

// propositions
CheckResult check_grid_vs_oracle(std::size_t instances, double max_relative_shortfall, std::uint64_t seed);
CheckResult check_p32_pruning(std::size_t instances, std::uint64_t seed);
CheckResult check_two_path_exclusions(std::size_t instances, std::uint64_t seed);
CheckResult check_sorted_pairing(std::size_t instances, double relative_tolerance, std::uint64_t seed);
CheckResult check_exchange_inequality(std::size_t instances, std::uint64_t seed);
CheckResult check_rate_monotone(std::size_t instances, std::uint64_t seed);

// lemmas
CheckResult check_lemmas(std::size_t instances, double lemma1_tolerance, double order_tolerance,
                         double pattern_tolerance, std::uint64_t seed);

// solvers
CheckResult check_water_filling(std::size_t instances, double budget_tolerance, std::uint64_t seed);
CheckResult check_solver_agreement(std::size_t instances, double relative_tolerance, double min_fraction,
                                   double residual_tolerance, std::uint64_t seed);
CheckResult check_budget_exactness(std::size_t instances, std::uint64_t seed);
CheckResult check_fig3_thresholds(double existence_db, double optimality_db, double tolerance_db);

// finite
CheckResult check_factorized_rate(std::size_t instances, std::uint64_t seed);
CheckResult check_refine_monotone(std::size_t instances, std::uint64_t seed);
CheckResult check_refine_vs_exhaustive(std::size_t instances, std::uint64_t seed);
CheckResult check_eigenmode_vs_isotropic(std::size_t instances, std::uint64_t seed);
CheckResult check_rounding_feasibility(std::size_t instances, std::uint64_t seed);
CheckResult check_direct_only(std::size_t instances, std::uint64_t seed);

struct ConvergenceLadder {
  std::vector<double> median_gap;  // one per (M, N) rung
  bool decreasing = false;
};
/// Median |rate_finite - rate_asym| / rate_asym over `seeds` realizations for
/// (16, 30x30), (32, 30x90), (64, 60x180) with the default link budget.
ConvergenceLadder finite_convergence_ladder(std::size_t seeds, std::size_t jobs, std::uint64_t seed);
CheckResult check_finite_convergence(std::size_t seeds, double max_final_gap, std::size_t jobs, std::uint64_t seed);

}  // namespace rispart
