// SPDX-License-Identifier: Apache-2.0
//
// Optimal power allocation and partition sizing for the asymptotic rate.
//
// Duals v (power budget) and w (partition simplex) refer to the natural-log
// objective. The stationarity system for activated cascaded paths S_a and
// direct paths I_a reads
//   v/m_s + v p_s t_s^2 - t_s^2 = 0        s in S_a
//   v/m_i + v p_i - 1 = 0                   i in I_a
//   w/m_s + w p_s t_s^2 - 2 p_s t_s = 0     s in S_a
//   w t_s - 2 v p_s = 0                     s in S_a
//   sum p = P,  sum t = 1.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rispart/asymptotic.hpp"

namespace rispart {

struct WaterFilling {
  std::vector<double> p;
  double v = 0.0;  // water level is 1/v
};

/// p_i = max(0, 1/v - 1/m_i) with sum p = budget. m need not be sorted.
WaterFilling water_filling(std::span<const double> m, double budget);

struct CubicRoot {
  double value = 0.0;
  bool valid = false;  // p >= max(4 v^2 P_r^2 / m, 1/(2 v))
};

/// Real roots of p^3 - p^2 / v + P_r^2 / m = 0 in ascending order (with multiplicity).
std::vector<CubicRoot> cubic_roots(double v, double p_r_total, double m);

enum class Label { Zero, Plus, Minus };
using Pattern = std::vector<Label>;

/// t_s = 1/w + sign * sqrt(1/w^2 - 1/m_s) for labelled entries, 0 otherwise.
std::vector<double> pattern_partition(std::span<const double> m_tilde, const Pattern& pattern, double w);

/// Every w in (0, sqrt(min m_s over labelled s)] at which pattern's t sums to 1.
std::vector<double> pattern_solutions(std::span<const double> m_tilde, const Pattern& pattern);

struct P32Result {
  std::vector<double> t;
  double w = 0.0;
  std::size_t plus_count = 1;           // leading plus labels of the chosen candidate
  double rate = 0.0;                    // sum log2(1 + m_s t_s^2)
  std::vector<bool> exists;             // exists[k-1]: pattern with k leading plus labels exists
  std::vector<double> candidate_rate;   // NaN when the pattern does not exist
};

/// Maximizes sum log2(1 + m_s t_s^2) over the simplex for fixed powers
/// (m_tilde sorted non-increasing, entries > 0).
P32Result solve_p32(std::span<const double> m_tilde);

/// Search interval for v given |S_a| = k, |I_a| = j (j = 0 drops the direct-path terms).
std::pair<double, double> search_bounds(std::size_t k, std::size_t j, std::span<const double> m_r,
                                        std::span<const double> m_d, double power);

struct GridSearchConfig {
  /// Grid step; 0 selects (b_u - b_l) / points per block.
  double grid_size = 0.0;
  std::size_t points = 2000;
  double accuracy = 1e-3;
  /// Bisect the budget residual between grid points where it changes sign.
  bool refine = true;
};

Solution grid_search(const AsymptoticProblem& problem, const GridSearchConfig& cfg = {});

struct KktResidual {
  std::vector<double> stationarity_p_r;  // dC/dp_s - v (+ implied multiplier)
  std::vector<double> stationarity_p_d;
  std::vector<double> stationarity_t;
  double budget_violation = 0.0;   // |sum p - P| / P
  double simplex_violation = 0.0;  // |sum t - 1|
  double sign_violation = 0.0;     // most negative primal entry, as a positive number
  std::vector<double> slackness_p_r;
  std::vector<double> slackness_p_d;
  std::vector<double> slackness_t;

  double max_stationarity() const;
  double max_slackness() const;
  double max_abs() const;
};

KktResidual kkt_residual(const AsymptoticProblem& problem, const Solution& solution);

struct LmConfig {
  double tolerance = 1e-10;
  std::size_t max_iterations = 500;
  std::size_t stall_limit = 50;
  double initial_damping = 1e-3;
};

struct LmResult {
  Solution solution;
  KktResidual kkt;
  bool converged = false;
  bool diverged = false;
  std::size_t iterations = 0;
  double residual_norm = 0.0;
};

/// Damped Gauss-Newton on the stationarity system for S_a = {0..k-1}, I_a = {0..j-1}.
LmResult lm_solve(const AsymptoticProblem& problem, std::size_t k, std::size_t j, const Allocation& initial,
                  std::optional<std::pair<double, double>> initial_duals = std::nullopt, const LmConfig& cfg = {});

/// Residual norm of the stationarity system at a solution (normalized units).
double system_residual(const AsymptoticProblem& problem, const Solution& solution);

/// Cold start: uniform t and water-filled powers on every block; best converged rate wins.
Solution lm_cold(const AsymptoticProblem& problem, const LmConfig& cfg = {});

enum class SolverKind { Grid, Lm, Both };

struct SolveConfig {
  SolverKind kind = SolverKind::Both;
  GridSearchConfig grid;
  LmConfig lm;
};

/// Grid search, optional LM polish, then the t-proportional-to-p and ordering checks on the output.
Solution solve(const AsymptoticProblem& problem, const SolveConfig& cfg = {});

/// Solution with t = e_1 and water-filling over the strongest cascaded path and all direct paths.
Solution single_path_solution(const AsymptoticProblem& problem);

/// Fills rate, active sets and S_min_star from the allocation.
void finalize_solution(const AsymptoticProblem& problem, Solution& solution);

}  // namespace rispart
