// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rispart/asymptotic.hpp"
#include "rispart/channel.hpp"
#include "rispart/partition.hpp"
#include "rispart/rng.hpp"

namespace rispart {

/// A diag(p) A^H.
Eigen::MatrixXcd eigenmode_covariance(const Eigen::MatrixXcd& basis, std::span<const double> powers);

/// log2 det(I + H Q H^H / sigma^2). Throws if Q has an eigenvalue below -1e-9 trace(Q).
double logdet_rate(const Eigen::MatrixXcd& h_eff, const Eigen::MatrixXcd& q, double noise_power);

struct FiniteEvaluation {
  PartitionPlan plan;            // realized plan, one entry per sub-surface that received columns
  std::vector<std::size_t> slot; // sorted cascaded index served by each sub-surface
  Eigen::MatrixXcd basis;        // Mt x K transmit steering vectors
  std::vector<double> powers;    // K stream powers (watts)
  Eigen::MatrixXcd q;
  double rate = 0.0;
  double asymptotic_rate = 0.0;
  double gap = 0.0;  // |rate - asymptotic_rate| / asymptotic_rate
  std::vector<std::size_t> dropped;
  bool reallocated = false;

  // Factorized effective channel: H_eff A = sum_s exp(j psi_s) blocks[s] + direct.
  std::vector<Eigen::MatrixXcd> blocks;
  Eigen::MatrixXcd direct;
  double noise_power = 1.0;
};

/// Rate of the evaluation's plan and powers for a different psi vector.
double rate_for_psi(const FiniteEvaluation& evaluation, std::span<const double> psi);

struct AdaptOptions {
  /// Draw psi uniformly on [0, 2 pi); when false all psi_s are 0.
  bool random_psi = true;
};

/// Rounds the partition, builds Theta with random psi, forms the eigenmode
/// covariance from the solved powers and evaluates the exact rate.
FiniteEvaluation adapt_solution(const Solution& solution, const AsymptoticProblem& problem,
                                const ChannelRealization& realization, const PairingMatrix& pairing,
                                const RisGeometry& ris, const ArrayGeometry& tx, Rng& rng,
                                const AdaptOptions& options = {});

/// Cyclic coordinate ascent over psi on a grid anchored at the current value.
FiniteEvaluation refine_common_phases(const FiniteEvaluation& evaluation, std::size_t sweeps = 2,
                                      std::size_t grid_points = 64);

}  // namespace rispart
