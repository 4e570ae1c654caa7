// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rispart/channel.hpp"
#include "rispart/partition.hpp"

namespace rispart {

/// Input of the asymptotic rate maximization. Coefficients are stored sorted
/// non-increasing; perm_r[s] / perm_d[i] give the index of the source entry.
struct AsymptoticProblem {
  std::vector<double> m_r;
  std::vector<double> m_d;
  double power = 1.0;  // watts
  std::vector<std::size_t> perm_r;
  std::vector<std::size_t> perm_d;

  std::size_t cascaded() const noexcept { return m_r.size(); }
  std::size_t direct() const noexcept { return m_d.size(); }
  void validate() const;
};

/// Sorts both coefficient lists (stable, ties by original index) and records the permutations.
AsymptoticProblem make_problem(std::vector<double> m_r, std::vector<double> m_d, double power);

struct Allocation {
  std::vector<double> p_r;
  std::vector<double> p_d;
  std::vector<double> t;
};

struct Solution {
  Allocation allocation;
  double v = 0.0;  // power dual (natural-log objective, watts^-1)
  double w = 0.0;  // partition dual
  std::vector<std::size_t> active_r;
  std::vector<std::size_t> active_d;
  double rate = 0.0;  // bit/s/Hz
  std::size_t s_min_star = 0;

  std::string method;
  bool lm_converged = false;
  std::size_t lm_iterations = 0;
  double residual_norm = 0.0;
  bool proportional_ok = true;
  bool ordered_ok = true;
};

/// Scalars shared by all coefficients of one realization.
struct CoefficientScale {
  double pl_cascaded = 0.0;
  double pl_direct = 0.0;
  std::size_t mt = 1;
  std::size_t mr = 1;
  std::size_t n = 1;
  double noise_power = 1.0;
};

/// Dimensions come from the synthesized matrices; throws if they are absent.
CoefficientScale coefficient_scale(const ChannelRealization& realization);

/// m_s = PL_r Mt Mr N^2 |alpha_u beta_v|^2 / (L1 L2 sigma^2) per paired (u, v);
/// m_i = PL_d Mt Mr |gamma_i|^2 / (L3 sigma^2).
AsymptoticProblem coefficients(std::span<const cd> alpha, std::span<const cd> beta, std::span<const cd> gamma,
                               const PairingMatrix& pairing, const CoefficientScale& scale, double power);
AsymptoticProblem coefficients(const ChannelRealization& realization, const PairingMatrix& pairing, double power);

/// sum log2(1 + m_s p_s t_s^2) + sum log2(1 + m_i p_i). Rejects allocations
/// that break the budget, simplex or sign constraints by more than 1e-9 relative.
double rate(const AsymptoticProblem& problem, const Allocation& allocation);
/// Same sum without constraint checks.
double rate_unchecked(std::span<const double> m_r, std::span<const double> m_d, const Allocation& allocation);

PairingMatrix optimal_pairing(std::size_t l1, std::size_t l2);

}  // namespace rispart
