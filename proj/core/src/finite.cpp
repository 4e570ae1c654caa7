// SPDX-License-Identifier: Apache-2.0

#include "rispart/finite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "rispart/solver.hpp"

namespace rispart {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// log2 det(I + G diag(p) G^H / sigma^2) on the smaller Gram side.
double gram_rate(const Eigen::MatrixXcd& g, std::span<const double> powers, double noise_power) {
  const auto k = g.cols();
  Eigen::VectorXd sq(k);
  for (Eigen::Index i = 0; i < k; ++i) sq[i] = std::sqrt(std::max(0.0, powers[static_cast<std::size_t>(i)]));
  const Eigen::MatrixXcd gs = g * sq.asDiagonal();
  Eigen::MatrixXcd m;
  if (gs.cols() <= gs.rows())
    m = gs.adjoint() * gs / noise_power;
  else
    m = gs * gs.adjoint() / noise_power;
  m.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXcd> llt(m);
  if (llt.info() != Eigen::Success) throw std::runtime_error("rate: factorization failed");
  const Eigen::MatrixXcd& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log2(std::real(l(i, i)));
  return 2.0 * acc;
}

Eigen::MatrixXcd assemble(const FiniteEvaluation& e, std::span<const double> psi) {
  Eigen::MatrixXcd g = e.direct;
  for (std::size_t s = 0; s < e.blocks.size(); ++s) g += std::polar(1.0, psi[s]) * e.blocks[s];
  return g;
}

}  // namespace

Eigen::MatrixXcd eigenmode_covariance(const Eigen::MatrixXcd& basis, std::span<const double> powers) {
  if (static_cast<std::size_t>(basis.cols()) != powers.size())
    throw std::invalid_argument("eigenmode_covariance: basis columns do not match power count");
  Eigen::VectorXd p(basis.cols());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    p[i] = powers[static_cast<std::size_t>(i)];
    if (p[i] < 0.0) throw std::invalid_argument("eigenmode_covariance: negative power");
  }
  return basis * p.asDiagonal() * basis.adjoint();
}

double logdet_rate(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& q, double noise_power) {
  if (q.rows() != q.cols() || h.cols() != q.rows()) throw std::invalid_argument("logdet_rate: dimension mismatch");
  if (!(noise_power > 0.0)) throw std::invalid_argument("logdet_rate: noise power must be positive");
  const Eigen::MatrixXcd qh = 0.5 * (q + q.adjoint());
  const double tr = std::real(qh.trace());
  if (qh.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(qh, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * std::max(tr, 0.0) - 1e-300)
      throw std::invalid_argument("logdet_rate: covariance is not positive semidefinite");
  }
  Eigen::MatrixXcd m = h * qh * h.adjoint() / noise_power;
  m = 0.5 * (m + m.adjoint());
  m.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXcd> llt(m);
  if (llt.info() != Eigen::Success) throw std::runtime_error("logdet_rate: factorization failed");
  const Eigen::MatrixXcd& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log2(std::real(l(i, i)));
  return 2.0 * acc;
}

double rate_for_psi(const FiniteEvaluation& e, std::span<const double> psi) {
  if (psi.size() != e.blocks.size()) throw std::invalid_argument("rate_for_psi: psi length mismatch");
  return gram_rate(assemble(e, psi), e.powers, e.noise_power);
}

FiniteEvaluation adapt_solution(const Solution& solution, const AsymptoticProblem& problem,
                                const ChannelRealization& r, const PairingMatrix& pairing, const RisGeometry& ris,
                                const ArrayGeometry& tx, Rng& rng, const AdaptOptions& options) {
  ris.validate();
  tx.validate();
  const auto pairs = pairing.pairs();
  if (pairs.size() != problem.cascaded()) throw std::invalid_argument("adapt_solution: pairing does not match problem");
  if (static_cast<std::size_t>(r.h1.rows()) != ris.size() || static_cast<std::size_t>(r.h1.cols()) != tx.elements)
    throw std::invalid_argument("adapt_solution: realization does not match geometries");

  FiniteEvaluation e;
  e.noise_power = r.noise_power;
  e.asymptotic_rate = solution.rate;

  const auto rounded = round_partition(solution.allocation.t, ris.ny);
  e.dropped = rounded.dropped;

  std::vector<double> p_r = solution.allocation.p_r;
  std::vector<double> p_d = solution.allocation.p_d;
  std::vector<double> t_real(problem.cascaded(), 0.0);
  for (std::size_t s = 0; s < problem.cascaded(); ++s)
    t_real[s] = static_cast<double>(rounded.counts[s]) / static_cast<double>(ris.ny);

  if (!rounded.dropped.empty()) {
    // Redistribute the budget over the paths that kept columns.
    std::vector<double> eff;
    for (std::size_t s = 0; s < problem.cascaded(); ++s) eff.push_back(problem.m_r[s] * t_real[s] * t_real[s]);
    eff.insert(eff.end(), problem.m_d.begin(), problem.m_d.end());
    const auto wf = water_filling(eff, problem.power);
    std::copy(wf.p.begin(), wf.p.begin() + static_cast<std::ptrdiff_t>(problem.cascaded()), p_r.begin());
    std::copy(wf.p.begin() + static_cast<std::ptrdiff_t>(problem.cascaded()), wf.p.end(), p_d.begin());
    e.reallocated = true;
  }

  for (std::size_t s = 0; s < problem.cascaded(); ++s) {
    if (rounded.counts[s] == 0) continue;
    const auto [u, v] = pairs[problem.perm_r[s]];
    PhaseGradient g = gradient_for(r.tx_ris.ris_arrival.at(u), r.ris_rx.ris_departure.at(v));
    g.u = u;
    g.v = v;
    e.plan.t.push_back(t_real[s]);
    e.plan.column_counts.push_back(rounded.counts[s]);
    e.plan.gradients.push_back(g);
    e.plan.psi.push_back(options.random_psi ? wrap_phase(kTwoPi * rng.uniform()) : 0.0);
    e.slot.push_back(s);
  }

  // Streams: one per cascaded path with power, then one per direct path with power.
  std::vector<Eigen::VectorXcd> cols;
  for (std::size_t s = 0; s < problem.cascaded(); ++s) {
    if (!(p_r[s] > 0.0)) continue;
    const std::size_t u = pairs[problem.perm_r[s]].first;
    cols.push_back(ula_response(r.tx_ris.ula_departure.at(u), tx));
    e.powers.push_back(p_r[s]);
  }
  for (std::size_t i = 0; i < problem.direct(); ++i) {
    if (!(p_d[i] > 0.0)) continue;
    cols.push_back(ula_response(r.tx_rx.ula_departure.at(problem.perm_d[i]), tx));
    e.powers.push_back(p_d[i]);
  }
  e.basis.resize(static_cast<Eigen::Index>(tx.elements), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) e.basis.col(static_cast<Eigen::Index>(c)) = cols[c];
  e.q = eigenmode_covariance(e.basis, e.powers);

  // Per-sub-surface factors with psi = 0.
  const Eigen::MatrixXcd h1a = r.h1 * e.basis;
  const double k = ris.wavenumber_spacing();
  const auto prefix = e.plan.prefix_columns();
  const double scale = std::sqrt(r.pl_cascaded);
  for (std::size_t s = 0; s < e.plan.size(); ++s) {
    const auto& g = e.plan.gradients[s];
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(r.h2.rows(), e.basis.cols());
    for (std::size_t ix = 0; ix < ris.nx; ++ix) {
      for (std::size_t iy = prefix[s]; iy < prefix[s + 1]; ++iy) {
        const auto n = static_cast<Eigen::Index>(ris.flat_index(ix, iy));
        const cd theta = std::polar(1.0, k * (static_cast<double>(ix) * g.gx + static_cast<double>(iy) * g.gy));
        acc.noalias() += (r.h2.col(n) * theta) * h1a.row(n);
      }
    }
    e.blocks.push_back(scale * acc);
  }
  e.direct = std::sqrt(r.pl_direct) * (r.h3 * e.basis);

  e.rate = rate_for_psi(e, e.plan.psi);
  e.gap = e.asymptotic_rate > 0.0 ? std::abs(e.rate - e.asymptotic_rate) / e.asymptotic_rate : 0.0;
  return e;
}

FiniteEvaluation refine_common_phases(const FiniteEvaluation& evaluation, std::size_t sweeps,
                                      std::size_t grid_points) {
  FiniteEvaluation out = evaluation;
  if (out.blocks.empty() || grid_points <= 1) return out;
  std::vector<double> psi = out.plan.psi;
  double best = rate_for_psi(out, psi);
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t s = 0; s < psi.size(); ++s) {
      const double anchor = psi[s];
      double best_phase = anchor;
      for (std::size_t g = 1; g < grid_points; ++g) {
        psi[s] = wrap_phase(anchor + kTwoPi * static_cast<double>(g) / static_cast<double>(grid_points));
        const double c = rate_for_psi(out, psi);
        if (c > best) {
          best = c;
          best_phase = psi[s];
        }
      }
      psi[s] = best_phase;
    }
  }
  out.plan.psi = psi;
  out.rate = best;
  out.gap = out.asymptotic_rate > 0.0 ? std::abs(out.rate - out.asymptotic_rate) / out.asymptotic_rate : 0.0;
  return out;
}

}  // namespace rispart
