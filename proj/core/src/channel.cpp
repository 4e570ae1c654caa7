// SPDX-License-Identifier: Apache-2.0

#include "rispart/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rispart {
namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

double steering_argument(double spacing, double wavelength, double direction_cosine) {
  return 2.0 * spacing / wavelength * direction_cosine;
}

}  // namespace

void ArrayGeometry::validate() const {
  require(elements >= 1, "ArrayGeometry: element count must be >= 1");
  require(spacing > 0.0, "ArrayGeometry: spacing must be positive");
  require(wavelength > 0.0, "ArrayGeometry: wavelength must be positive");
}

double ArrayGeometry::wavenumber_spacing() const { return 2.0 * kPi * spacing / wavelength; }

void RisGeometry::validate() const {
  require(nx >= 1 && ny >= 1, "RisGeometry: Nx and Ny must be >= 1");
  require(spacing > 0.0, "RisGeometry: spacing must be positive");
  require(wavelength > 0.0, "RisGeometry: wavelength must be positive");
}

double RisGeometry::wavenumber_spacing() const { return 2.0 * kPi * spacing / wavelength; }

double Direction::cos_x() const { return std::sin(elevation) * std::cos(azimuth); }
double Direction::cos_y() const { return std::sin(elevation) * std::sin(azimuth); }

void PathSet::validate() const {
  const std::size_t l = gains.size();
  require(l >= 1, "PathSet: at least one path required");
  switch (hop) {
    case Hop::TxRis:
      require(ula_departure.size() == l && ris_arrival.size() == l, "PathSet: Tx-RIS angle count mismatch");
      break;
    case Hop::RisRx:
      require(ris_departure.size() == l && ula_arrival.size() == l, "PathSet: RIS-Rx angle count mismatch");
      break;
    case Hop::TxRx:
      require(ula_departure.size() == l && ula_arrival.size() == l, "PathSet: Tx-Rx angle count mismatch");
      break;
  }
  for (std::size_t i = 1; i < l; ++i)
    require(std::abs(gains[i]) <= std::abs(gains[i - 1]), "PathSet: gains not sorted by magnitude");
}

Eigen::VectorXcd steering_vector(double phi, std::size_t m) {
  require(m >= 1, "steering_vector: M must be >= 1");
  Eigen::VectorXcd e(static_cast<Eigen::Index>(m));
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    // Reduce the phase modulo 2*pi on the integer part first so that
    // phi and phi + 2 produce bit-identical entries.
    const double phase = kPi * std::remainder(static_cast<double>(i) * phi, 2.0);
    e[static_cast<Eigen::Index>(i)] = scale * cd(std::cos(phase), std::sin(phase));
  }
  return e;
}

Eigen::VectorXcd ula_response(double theta, const ArrayGeometry& g) {
  g.validate();
  return steering_vector(steering_argument(g.spacing, g.wavelength, std::sin(theta)), g.elements);
}

Eigen::VectorXcd ris_response(const Direction& dir, const RisGeometry& g) {
  g.validate();
  const Eigen::VectorXcd ex = steering_vector(steering_argument(g.spacing, g.wavelength, dir.cos_x()), g.nx);
  const Eigen::VectorXcd ey = steering_vector(steering_argument(g.spacing, g.wavelength, dir.cos_y()), g.ny);
  Eigen::VectorXcd b(static_cast<Eigen::Index>(g.size()));
  for (std::size_t ix = 0; ix < g.nx; ++ix)
    b.segment(static_cast<Eigen::Index>(ix * g.ny), static_cast<Eigen::Index>(g.ny)) =
        ex[static_cast<Eigen::Index>(ix)] * ey;
  return b;
}

PathSet sample_paths(Rng& rng, std::size_t count, Hop hop) {
  require(count >= 1, "sample_paths: L must be >= 1");
  PathSet ps;
  ps.hop = hop;
  ps.gains.resize(count);

  auto draw_ula = [&] { return 2.0 * kPi * rng.uniform_open_closed(); };
  auto draw_ris = [&] {
    Direction d;
    d.elevation = 0.5 * kPi * rng.uniform_open_closed();
    d.azimuth = 2.0 * kPi * rng.uniform_open_closed();
    return d;
  };

  for (std::size_t l = 0; l < count; ++l) {
    switch (hop) {
      case Hop::TxRis:
        ps.ula_departure.push_back(draw_ula());
        ps.ris_arrival.push_back(draw_ris());
        break;
      case Hop::RisRx:
        ps.ris_departure.push_back(draw_ris());
        ps.ula_arrival.push_back(draw_ula());
        break;
      case Hop::TxRx:
        ps.ula_departure.push_back(draw_ula());
        ps.ula_arrival.push_back(draw_ula());
        break;
    }
    ps.gains[l] = rng.complex_normal();
  }

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(ps.gains[a]) > std::abs(ps.gains[b]); });

  auto permute = [&](auto& v) {
    if (v.empty()) return;
    auto copy = v;
    for (std::size_t i = 0; i < count; ++i) v[i] = copy[order[i]];
  };
  permute(ps.gains);
  permute(ps.ula_departure);
  permute(ps.ula_arrival);
  permute(ps.ris_departure);
  permute(ps.ris_arrival);
  return ps;
}

Eigen::MatrixXcd synth_tx_ris(const PathSet& paths, const ArrayGeometry& tx, const RisGeometry& ris) {
  if (paths.hop != Hop::TxRis) throw std::invalid_argument("synth_tx_ris: path set is not a Tx-RIS hop");
  paths.validate();
  const auto n = static_cast<Eigen::Index>(ris.size());
  const auto mt = static_cast<Eigen::Index>(tx.elements);
  const double l = static_cast<double>(paths.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, mt);
  for (std::size_t i = 0; i < paths.size(); ++i)
    h.noalias() += paths.gains[i] * ris_response(paths.ris_arrival[i], ris) *
                   ula_response(paths.ula_departure[i], tx).adjoint();
  return std::sqrt(static_cast<double>(n) * static_cast<double>(mt) / l) * h;
}

Eigen::MatrixXcd synth_ris_rx(const PathSet& paths, const RisGeometry& ris, const ArrayGeometry& rx) {
  if (paths.hop != Hop::RisRx) throw std::invalid_argument("synth_ris_rx: path set is not a RIS-Rx hop");
  paths.validate();
  const auto n = static_cast<Eigen::Index>(ris.size());
  const auto mr = static_cast<Eigen::Index>(rx.elements);
  const double l = static_cast<double>(paths.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(mr, n);
  for (std::size_t i = 0; i < paths.size(); ++i)
    h.noalias() += paths.gains[i] * ula_response(paths.ula_arrival[i], rx) *
                   ris_response(paths.ris_departure[i], ris).adjoint();
  return std::sqrt(static_cast<double>(mr) * static_cast<double>(n) / l) * h;
}

Eigen::MatrixXcd synth_tx_rx(const PathSet& paths, const ArrayGeometry& tx, const ArrayGeometry& rx) {
  if (paths.hop != Hop::TxRx) throw std::invalid_argument("synth_tx_rx: path set is not a Tx-Rx hop");
  paths.validate();
  const auto mt = static_cast<Eigen::Index>(tx.elements);
  const auto mr = static_cast<Eigen::Index>(rx.elements);
  const double l = static_cast<double>(paths.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(mr, mt);
  for (std::size_t i = 0; i < paths.size(); ++i)
    h.noalias() += paths.gains[i] * ula_response(paths.ula_arrival[i], rx) *
                   ula_response(paths.ula_departure[i], tx).adjoint();
  return std::sqrt(static_cast<double>(mr) * static_cast<double>(mt) / l) * h;
}

PathLoss path_loss(double wavelength, double d1, double d2, double d3, double exponent) {
  require(wavelength > 0.0 && d1 > 0.0 && d2 > 0.0 && d3 > 0.0, "path_loss: distances and wavelength must be positive");
  const double lam2 = wavelength * wavelength;
  PathLoss pl;
  pl.cascaded = lam2 / (64.0 * kPi * kPi * kPi * std::pow(d1, exponent) * std::pow(d2, exponent));
  pl.direct = lam2 / (16.0 * kPi * kPi * std::pow(d3, exponent));
  return pl;
}

Eigen::MatrixXcd effective_channel(const ChannelRealization& r, std::span<const cd> theta) {
  const auto n = r.h1.rows();
  if (static_cast<Eigen::Index>(theta.size()) != n || r.h2.cols() != n)
    throw std::invalid_argument("effective_channel: theta length does not match RIS size");
  if (r.h2.rows() != r.h3.rows() || r.h1.cols() != r.h3.cols())
    throw std::invalid_argument("effective_channel: inconsistent channel dimensions");
  for (const cd& x : theta)
    if (std::abs(std::abs(x) - 1.0) > 1e-9)
      throw std::invalid_argument("effective_channel: reflection coefficients must be unit modulus");

  Eigen::MatrixXcd out = std::sqrt(r.pl_direct) * r.h3;
  if (r.pl_cascaded > 0.0) {
    const Eigen::Map<const Eigen::VectorXcd> th(theta.data(), n);
    const Eigen::MatrixXcd scaled_h1 = th.asDiagonal() * r.h1;
    out.noalias() += std::sqrt(r.pl_cascaded) * (r.h2 * scaled_h1);
  }
  return out;
}

}  // namespace rispart
