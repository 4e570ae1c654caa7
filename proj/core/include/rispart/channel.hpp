// SPDX-License-Identifier: Apache-2.0
//
// Geometric (ray-based) MIMO channel model for a RIS-aided link.
//
// Conventions used throughout the library:
//  * steering entries are exp(+j*pi*m*phi)/sqrt(M), m = 0..M-1;
//  * the RIS response is e_x (length Nx) kron e_y (length Ny), so element
//    (ix, iy) sits at flat index ix*Ny + iy; a "column" is a fixed iy.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rispart/rng.hpp"

namespace rispart {

using cd = std::complex<double>;

struct ArrayGeometry {
  std::size_t elements = 1;
  double spacing = 0.5;     // meters
  double wavelength = 1.0;  // meters

  void validate() const;
  /// Phase increment per element for a unit direction cosine, 2*pi*d/lambda.
  double wavenumber_spacing() const;
};

struct RisGeometry {
  std::size_t nx = 1;
  std::size_t ny = 1;
  double spacing = 0.5;
  double wavelength = 1.0;

  void validate() const;
  std::size_t size() const noexcept { return nx * ny; }
  double wavenumber_spacing() const;
  std::size_t flat_index(std::size_t ix, std::size_t iy) const noexcept { return ix * ny + iy; }
};

/// Spherical direction seen from the RIS plane.
struct Direction {
  double elevation = 0.0;  // (0, pi/2]
  double azimuth = 0.0;    // (0, 2*pi]

  double cos_x() const;  // sin(elevation) cos(azimuth)
  double cos_y() const;  // sin(elevation) sin(azimuth)
};

enum class Hop { TxRis, RisRx, TxRx };

/// Resolvable paths of one hop, gains sorted by non-increasing magnitude.
///
/// Only the angle vectors relevant to the hop are populated:
///   TxRis: ula_departure (Tx)  + ris_arrival  (RIS)
///   RisRx: ris_departure (RIS) + ula_arrival  (Rx)
///   TxRx : ula_departure (Tx)  + ula_arrival  (Rx)
struct PathSet {
  Hop hop = Hop::TxRx;
  std::vector<cd> gains;
  std::vector<double> ula_departure;
  std::vector<double> ula_arrival;
  std::vector<Direction> ris_departure;
  std::vector<Direction> ris_arrival;

  std::size_t size() const noexcept { return gains.size(); }
  void validate() const;
};

struct ChannelRealization {
  Eigen::MatrixXcd h1;  // N x Mt
  Eigen::MatrixXcd h2;  // Mr x N
  Eigen::MatrixXcd h3;  // Mr x Mt
  double pl_cascaded = 0.0;
  double pl_direct = 0.0;
  double noise_power = 1.0;  // watts
  PathSet tx_ris;
  PathSet ris_rx;
  PathSet tx_rx;
};

/// e(phi, M): entries exp(+j*pi*m*phi)/sqrt(M).
Eigen::VectorXcd steering_vector(double phi, std::size_t m);

/// ULA response a_M(theta) = e((2d/lambda) sin(theta), M).
Eigen::VectorXcd ula_response(double theta, const ArrayGeometry& geometry);

/// RIS response b_N(elevation, azimuth) = e_x kron e_y.
Eigen::VectorXcd ris_response(const Direction& direction, const RisGeometry& geometry);

/// Draws `count` paths for `hop`: continuous uniform angles and CN(0,1)
/// gains sorted by descending magnitude. ULA angles are uniform on (0, 2*pi].
PathSet sample_paths(Rng& rng, std::size_t count, Hop hop);

/// H1 (N x Mt) from Tx-RIS paths.
Eigen::MatrixXcd synth_tx_ris(const PathSet& paths, const ArrayGeometry& tx, const RisGeometry& ris);
/// H2 (Mr x N) from RIS-Rx paths.
Eigen::MatrixXcd synth_ris_rx(const PathSet& paths, const RisGeometry& ris, const ArrayGeometry& rx);
/// H3 (Mr x Mt) from Tx-Rx paths.
Eigen::MatrixXcd synth_tx_rx(const PathSet& paths, const ArrayGeometry& tx, const ArrayGeometry& rx);

struct PathLoss {
  double cascaded = 0.0;
  double direct = 0.0;
};

/// PL_r = lambda^2 / (64 pi^3 d1^e d2^e), PL_d = lambda^2 / (16 pi^2 d3^e).
PathLoss path_loss(double wavelength, double d1, double d2, double d3, double exponent);

/// sqrt(PL_r) H2 diag(theta) H1 + sqrt(PL_d) H3. Rejects |theta_n| != 1 (tol 1e-9).
Eigen::MatrixXcd effective_channel(const ChannelRealization& realization, std::span<const cd> theta);

}  // namespace rispart
