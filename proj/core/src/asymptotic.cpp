// SPDX-License-Identifier: Apache-2.0

#include "rispart/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rispart {
namespace {

std::vector<std::size_t> descending_order(const std::vector<double>& m) {
  std::vector<std::size_t> idx(m.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return m[a] > m[b]; });
  return idx;
}

std::vector<double> gather(const std::vector<double>& m, const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(m[i]);
  return out;
}

}  // namespace

void AsymptoticProblem::validate() const {
  if (!(power > 0.0)) throw std::invalid_argument("AsymptoticProblem: power must be positive");
  if (m_r.empty()) throw std::invalid_argument("AsymptoticProblem: at least one cascaded path required");
  for (std::size_t i = 0; i < m_r.size(); ++i) {
    if (!(m_r[i] >= 0.0) || !std::isfinite(m_r[i])) throw std::invalid_argument("AsymptoticProblem: bad m_r");
    if (i && m_r[i] > m_r[i - 1]) throw std::invalid_argument("AsymptoticProblem: m_r not sorted");
  }
  for (std::size_t i = 0; i < m_d.size(); ++i) {
    if (!(m_d[i] >= 0.0) || !std::isfinite(m_d[i])) throw std::invalid_argument("AsymptoticProblem: bad m_d");
    if (i && m_d[i] > m_d[i - 1]) throw std::invalid_argument("AsymptoticProblem: m_d not sorted");
  }
  if (perm_r.size() != m_r.size() || perm_d.size() != m_d.size())
    throw std::invalid_argument("AsymptoticProblem: permutation length mismatch");
}

AsymptoticProblem make_problem(std::vector<double> m_r, std::vector<double> m_d, double power) {
  AsymptoticProblem p;
  p.perm_r = descending_order(m_r);
  p.perm_d = descending_order(m_d);
  p.m_r = gather(m_r, p.perm_r);
  p.m_d = gather(m_d, p.perm_d);
  p.power = power;
  p.validate();
  return p;
}

CoefficientScale coefficient_scale(const ChannelRealization& r) {
  if (r.h1.size() == 0 || r.h2.size() == 0)
    throw std::invalid_argument("coefficient_scale: realization has no channel matrices");
  CoefficientScale s;
  s.pl_cascaded = r.pl_cascaded;
  s.pl_direct = r.pl_direct;
  s.mt = static_cast<std::size_t>(r.h1.cols());
  s.mr = static_cast<std::size_t>(r.h2.rows());
  s.n = static_cast<std::size_t>(r.h1.rows());
  s.noise_power = r.noise_power;
  return s;
}

AsymptoticProblem coefficients(std::span<const cd> alpha, std::span<const cd> beta, std::span<const cd> gamma,
                               const PairingMatrix& pairing, const CoefficientScale& sc, double power) {
  if (pairing.rows() != alpha.size() || pairing.cols() != beta.size())
    throw std::invalid_argument("coefficients: pairing size does not match path counts");
  if (pairing.ones() == 0) throw std::invalid_argument("coefficients: pairing selects no path pair");
  const double mtmr = static_cast<double>(sc.mt) * static_cast<double>(sc.mr);
  const double n = static_cast<double>(sc.n);
  const double l1l2 = static_cast<double>(alpha.size()) * static_cast<double>(beta.size());
  std::vector<double> m_r;
  for (auto [u, v] : pairing.pairs())
    m_r.push_back(sc.pl_cascaded * mtmr * n * n * std::norm(alpha[u] * beta[v]) / (l1l2 * sc.noise_power));
  std::vector<double> m_d;
  const double l3 = static_cast<double>(gamma.size());
  for (const cd& g : gamma) m_d.push_back(sc.pl_direct * mtmr * std::norm(g) / (l3 * sc.noise_power));
  return make_problem(std::move(m_r), std::move(m_d), power);
}

AsymptoticProblem coefficients(const ChannelRealization& r, const PairingMatrix& pairing, double power) {
  return coefficients(r.tx_ris.gains, r.ris_rx.gains, r.tx_rx.gains, pairing, coefficient_scale(r), power);
}

double rate_unchecked(std::span<const double> m_r, std::span<const double> m_d, const Allocation& a) {
  double c = 0.0;
  for (std::size_t s = 0; s < m_r.size(); ++s) c += std::log2(1.0 + m_r[s] * a.p_r[s] * a.t[s] * a.t[s]);
  for (std::size_t i = 0; i < m_d.size(); ++i) c += std::log2(1.0 + m_d[i] * a.p_d[i]);
  return c;
}

double rate(const AsymptoticProblem& problem, const Allocation& a) {
  if (a.p_r.size() != problem.cascaded() || a.t.size() != problem.cascaded() || a.p_d.size() != problem.direct())
    throw std::invalid_argument("rate: allocation dimensions do not match the problem");
  constexpr double tol = 1e-9;
  double psum = 0.0;
  double tsum = 0.0;
  for (double x : a.p_r) {
    if (x < -tol * problem.power) throw std::invalid_argument("rate: negative cascaded power");
    psum += x;
  }
  for (double x : a.p_d) {
    if (x < -tol * problem.power) throw std::invalid_argument("rate: negative direct power");
    psum += x;
  }
  for (double x : a.t) {
    if (x < -tol) throw std::invalid_argument("rate: negative partition ratio");
    tsum += x;
  }
  if (std::abs(psum - problem.power) > tol * problem.power) throw std::invalid_argument("rate: power budget violated");
  if (std::abs(tsum - 1.0) > tol) throw std::invalid_argument("rate: partition ratios do not sum to 1");
  return rate_unchecked(problem.m_r, problem.m_d, a);
}

PairingMatrix optimal_pairing(std::size_t l1, std::size_t l2) { return PairingMatrix::identity_prefix(l1, l2); }

}  // namespace rispart
