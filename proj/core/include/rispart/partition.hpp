// SPDX-License-Identifier: Apache-2.0
//
// Sub-surface phase configuration and normalized passive beamforming gains.
//
// A sub-surface s owns the contiguous column block [Ntot_{s-1}, Ntot_s) of
// the RIS. Element (ix, iy) of sub-surface s is set to
//   psi_s + k (ix g_x,s + iy g_y,s),   k = 2 pi d / lambda,
// with ix, iy the 0-based global row and column indices.

#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rispart/channel.hpp"

namespace rispart {

/// Phase-gradient pair. When built from a path pair, (u, v) record the
/// Tx-RIS and RIS-Rx path indices (0-based).
struct PhaseGradient {
  double gx = 0.0;
  double gy = 0.0;
  std::size_t u = 0;
  std::size_t v = 0;
};

/// zeta_x = cos_x(departure v) - cos_x(arrival u), likewise for y.
PhaseGradient gradient_for(const Direction& tx_ris_arrival, const Direction& ris_rx_departure);

/// All L1*L2 gradients, row-major in (u, v).
struct GradientTable {
  std::size_t l1 = 0;
  std::size_t l2 = 0;
  std::vector<PhaseGradient> entries;
  /// Pairs (a, b) of flat indices whose gradients coincide (|diff| < 1e-12).
  std::vector<std::pair<std::size_t, std::size_t>> duplicates;

  const PhaseGradient& at(std::size_t u, std::size_t v) const { return entries.at(u * l2 + v); }
};

GradientTable feasible_gradients(const PathSet& tx_ris, const PathSet& ris_rx);

/// Binary L1 x L2 pairing with at most one 1 per row and per column.
class PairingMatrix {
public:
  PairingMatrix(std::size_t l1, std::size_t l2);
  /// Validates entries in {0,1} and the row/column constraint.
  PairingMatrix(std::size_t l1, std::size_t l2, std::vector<int> entries);

  /// [I, 0] (or its transpose): k-th strongest paired with k-th strongest.
  static PairingMatrix identity_prefix(std::size_t l1, std::size_t l2);
  /// Builds from explicit (u, v) pairs.
  static PairingMatrix from_pairs(std::size_t l1, std::size_t l2,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

  std::size_t rows() const noexcept { return l1_; }
  std::size_t cols() const noexcept { return l2_; }
  int operator()(std::size_t u, std::size_t v) const { return entries_.at(u * l2_ + v); }
  std::size_t ones() const;
  /// Paired (u, v) in increasing u.
  std::vector<std::pair<std::size_t, std::size_t>> pairs() const;

private:
  void check() const;

  std::size_t l1_;
  std::size_t l2_;
  std::vector<int> entries_;
};

struct PartitionPlan {
  std::vector<double> t;
  std::vector<std::size_t> column_counts;  // empty until realized
  std::vector<PhaseGradient> gradients;
  std::vector<double> psi;

  std::size_t size() const noexcept { return t.size(); }
  bool realized() const noexcept { return !column_counts.empty(); }
  /// Checks lengths, sum(t) = 1, psi in [0, 2 pi) and, when realized, sum(counts) = ny.
  void validate(std::size_t ny) const;
  /// Ntot_0 = 0, Ntot_s = counts_1 + ... + counts_s (length S + 1).
  std::vector<std::size_t> prefix_columns() const;
  /// t recomputed from the realized column counts.
  std::vector<double> realized_t() const;
  PairingMatrix pairing(std::size_t l1, std::size_t l2) const;
};

/// Flat key=value record, one key per line.
void write_plan(std::ostream& out, const PartitionPlan& plan);
PartitionPlan read_plan(std::istream& in);
std::string serialize_plan(const PartitionPlan& plan);
PartitionPlan parse_plan(const std::string& text);

/// sin(K x) / (K sin x) with removable singularities at x = m pi filled in.
double dirichlet_ratio(std::size_t k, double x);

std::vector<cd> build_theta(const PartitionPlan& plan, const RisGeometry& ris);

/// (1/N) sum_n theta_n exp(-j k (ix zeta_x + iy zeta_y)).
cd gain_direct_sum(std::span<const cd> theta, const RisGeometry& ris, const PhaseGradient& zeta);

/// Per-sub-surface Dirichlet form; uses the realized column counts.
cd gain_closed_form(const PartitionPlan& plan, const RisGeometry& ris, const PhaseGradient& zeta);

/// Limit N -> infinity: only sub-surfaces configured for pair (u, v) contribute.
cd gain_asymptotic(const PartitionPlan& plan, std::size_t u, std::size_t v);

struct RoundedPartition {
  std::vector<std::size_t> counts;
  std::vector<std::size_t> dropped;  // indices with t_s > 0 that received no column
  bool reapportioned = false;
};

/// Largest-remainder apportionment of ny columns, ties to the lower index.
RoundedPartition round_partition(std::span<const double> t, std::size_t ny);

/// Tiled partition: the RIS is cut into tiles_x x tiles_y rectangular tiles of
/// tile_nx x tile_ny elements; each tile belongs to one sub-surface.
struct TilePlan {
  double alpha = 0.5;
  std::size_t tiles_x = 1;
  std::size_t tiles_y = 1;
  std::size_t tile_nx = 1;
  std::size_t tile_ny = 1;
  std::vector<std::size_t> owner;  // index mx * tiles_y + my
  std::vector<PhaseGradient> gradients;
  std::vector<double> psi;  // psi_s, shared phase after alignment

  std::size_t size() const noexcept { return gradients.size(); }
  std::size_t tile_count() const noexcept { return tiles_x * tiles_y; }
  std::vector<double> mu() const;
  void validate(const RisGeometry& ris) const;
  /// Per-tile common phase that makes every tile of s present the same psi_s.
  double tile_phase(std::size_t mx, std::size_t my, double k) const;
};

/// Validates the tile grid for N^alpha and builds a plan from an owner map.
TilePlan make_tile_plan(const RisGeometry& ris, double alpha, std::vector<std::size_t> owner,
                        std::vector<PhaseGradient> gradients, std::vector<double> psi);

/// Stripes of whole tile columns sized by mu; mu_s * N^alpha must be an integer multiple of tiles_x.
TilePlan tile_plan_from_mu(const RisGeometry& ris, double alpha, std::span<const double> mu,
                           std::vector<PhaseGradient> gradients, std::vector<double> psi);

/// Tile plan reproducing a realized horizontal partition.
TilePlan tile_plan_from_partition(const PartitionPlan& plan, const RisGeometry& ris, double alpha);

std::vector<cd> build_theta(const TilePlan& tiles, const RisGeometry& ris);
cd tile_plan_gain(const TilePlan& tiles, const RisGeometry& ris, const PhaseGradient& zeta);
cd tile_plan_gain_asymptotic(const TilePlan& tiles, std::size_t u, std::size_t v);

}  // namespace rispart
