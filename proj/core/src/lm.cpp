// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "rispart/solver.hpp"

namespace rispart {
namespace {

// Unknowns in units where the budget is 1: [p_r(k), p_d(j), t(k), v, w].
// With k = 0 only [p_d(j), v] remain and the partition equations are dropped.
struct Layout {
  std::size_t k;
  std::size_t j;
  std::size_t unknowns() const { return k ? 2 * k + j + 2 : j + 1; }
  std::size_t equations() const { return k ? 3 * k + j + 2 : j + 1; }
  std::size_t pr(std::size_t s) const { return s; }
  std::size_t pd(std::size_t i) const { return k + i; }
  std::size_t t(std::size_t s) const { return k + j + s; }
  std::size_t v() const { return k ? 2 * k + j : j; }
  std::size_t w() const { return 2 * k + j + 1; }
};

Eigen::VectorXd residuals(const Layout& L, const Eigen::VectorXd& x, const std::vector<double>& mr,
                          const std::vector<double>& md) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(L.equations()));
  const double v = x[L.v()];
  const double w = L.k ? x[L.w()] : 0.0;
  Eigen::Index row = 0;
  double psum = 0.0;
  double tsum = 0.0;
  for (std::size_t s = 0; s < L.k; ++s) {
    const double p = x[L.pr(s)];
    const double t = x[L.t(s)];
    r[row++] = v / mr[s] + v * p * t * t - t * t;
    r[row++] = w / mr[s] + w * p * t * t - 2.0 * p * t;
    r[row++] = w * t - 2.0 * v * p;
    psum += p;
    tsum += t;
  }
  for (std::size_t i = 0; i < L.j; ++i) {
    const double p = x[L.pd(i)];
    r[row++] = v / md[i] + v * p - 1.0;
    psum += p;
  }
  r[row++] = psum - 1.0;
  if (L.k) r[row++] = tsum - 1.0;
  return r;
}

Eigen::MatrixXd jacobian(const Layout& L, const Eigen::VectorXd& x, const std::vector<double>& mr,
                         const std::vector<double>& md) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(L.equations()),
                                            static_cast<Eigen::Index>(L.unknowns()));
  const double v = x[L.v()];
  const double w = L.k ? x[L.w()] : 0.0;
  Eigen::Index row = 0;
  for (std::size_t s = 0; s < L.k; ++s) {
    const auto ip = static_cast<Eigen::Index>(L.pr(s));
    const auto it = static_cast<Eigen::Index>(L.t(s));
    const double p = x[ip];
    const double t = x[it];
    J(row, ip) = v * t * t;
    J(row, it) = 2.0 * v * p * t - 2.0 * t;
    J(row, L.v()) = 1.0 / mr[s] + p * t * t;
    ++row;
    J(row, ip) = w * t * t - 2.0 * t;
    J(row, it) = 2.0 * w * p * t - 2.0 * p;
    J(row, L.w()) = 1.0 / mr[s] + p * t * t;
    ++row;
    J(row, ip) = -2.0 * v;
    J(row, it) = w;
    J(row, L.v()) = -2.0 * p;
    J(row, L.w()) = t;
    ++row;
  }
  for (std::size_t i = 0; i < L.j; ++i) {
    const auto ip = static_cast<Eigen::Index>(L.pd(i));
    J(row, ip) = v;
    J(row, L.v()) = 1.0 / md[i] + x[ip];
    ++row;
  }
  for (std::size_t s = 0; s < L.k; ++s) J(row, static_cast<Eigen::Index>(L.pr(s))) = 1.0;
  for (std::size_t i = 0; i < L.j; ++i) J(row, static_cast<Eigen::Index>(L.pd(i))) = 1.0;
  ++row;
  if (L.k)
    for (std::size_t s = 0; s < L.k; ++s) J(row, static_cast<Eigen::Index>(L.t(s))) = 1.0;
  return J;
}

std::vector<double> scaled(const std::vector<double>& m, double power) {
  std::vector<double> out(m);
  for (double& x : out) x *= power;
  return out;
}

Solution to_solution(const AsymptoticProblem& problem, const Layout& L, const Eigen::VectorXd& x) {
  const double P = problem.power;
  Solution sol;
  auto& a = sol.allocation;
  a.p_r.assign(problem.cascaded(), 0.0);
  a.t.assign(problem.cascaded(), 0.0);
  a.p_d.assign(problem.direct(), 0.0);
  for (std::size_t s = 0; s < L.k; ++s) {
    a.p_r[s] = x[static_cast<Eigen::Index>(L.pr(s))] * P;
    a.t[s] = x[static_cast<Eigen::Index>(L.t(s))];
  }
  for (std::size_t i = 0; i < L.j; ++i) a.p_d[i] = x[static_cast<Eigen::Index>(L.pd(i))] * P;
  if (L.k == 0) a.t[0] = 1.0;
  // Remove round-off drift so the simplex and budget hold exactly.
  const double t_sum = std::accumulate(a.t.begin(), a.t.end(), 0.0);
  const double p_sum = std::accumulate(a.p_r.begin(), a.p_r.end(), 0.0) + std::accumulate(a.p_d.begin(), a.p_d.end(), 0.0);
  if (t_sum > 0.0)
    for (double& t : a.t) t /= t_sum;
  if (p_sum > 0.0) {
    for (double& p : a.p_r) p *= P / p_sum;
    for (double& p : a.p_d) p *= P / p_sum;
  }
  sol.v = x[static_cast<Eigen::Index>(L.v())] / P;
  sol.w = L.k ? x[static_cast<Eigen::Index>(L.w())] : 0.0;
  sol.method = "lm";
  finalize_solution(problem, sol);
  return sol;
}

bool better(const Solution& a, const Solution& b) {
  if (a.rate > b.rate + 1e-12) return true;
  if (a.rate < b.rate - 1e-12) return false;
  if (a.active_r.size() != b.active_r.size()) return a.active_r.size() < b.active_r.size();
  return a.active_d.size() < b.active_d.size();
}

}  // namespace

LmResult lm_solve(const AsymptoticProblem& problem, std::size_t k, std::size_t j, const Allocation& initial,
                  std::optional<std::pair<double, double>> initial_duals, const LmConfig& cfg) {
  problem.validate();
  if (k > problem.cascaded() || j > problem.direct() || (k == 0 && j == 0))
    throw std::invalid_argument("lm_solve: activated sets out of range");
  if (initial.p_r.size() != problem.cascaded() || initial.t.size() != problem.cascaded() ||
      initial.p_d.size() != problem.direct())
    throw std::invalid_argument("lm_solve: initial allocation dimensions do not match");
  const double P = problem.power;
  const auto mr = scaled(problem.m_r, P);
  const auto md = scaled(problem.m_d, P);
  const Layout L{k, j};

  Eigen::VectorXd x(static_cast<Eigen::Index>(L.unknowns()));
  for (std::size_t s = 0; s < k; ++s) {
    x[static_cast<Eigen::Index>(L.pr(s))] = initial.p_r[s] / P;
    x[static_cast<Eigen::Index>(L.t(s))] = initial.t[s];
  }
  for (std::size_t i = 0; i < j; ++i) x[static_cast<Eigen::Index>(L.pd(i))] = initial.p_d[i] / P;
  if (initial_duals) {
    x[static_cast<Eigen::Index>(L.v())] = initial_duals->first * P;
    if (k) x[static_cast<Eigen::Index>(L.w())] = initial_duals->second;
  } else {
    std::vector<double> eff;
    for (std::size_t s = 0; s < k; ++s) eff.push_back(mr[s] * initial.t[s] * initial.t[s]);
    for (std::size_t i = 0; i < j; ++i) eff.push_back(md[i]);
    const auto wf = water_filling(eff, 1.0);
    double pr = 0.0;
    for (std::size_t s = 0; s < k; ++s) pr += x[static_cast<Eigen::Index>(L.pr(s))];
    x[static_cast<Eigen::Index>(L.v())] = wf.v;
    if (k) x[static_cast<Eigen::Index>(L.w())] = 2.0 * wf.v * pr;
  }

  auto cost_of = [&](const Eigen::VectorXd& y) { return residuals(L, y, mr, md).norm(); };

  LmResult res;
  double cost = cost_of(x);
  double lambda = cfg.initial_damping;
  std::size_t stall = 0;
  std::size_t it = 0;
  for (; it < cfg.max_iterations; ++it) {
    if (cost < cfg.tolerance) break;
    const Eigen::VectorXd r = residuals(L, x, mr, md);
    const Eigen::MatrixXd J = jacobian(L, x, mr, md);
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    Eigen::MatrixXd damped = A;
    for (Eigen::Index d = 0; d < A.rows(); ++d) damped(d, d) += lambda * std::max(A(d, d), 1e-12);
    const Eigen::VectorXd step = damped.ldlt().solve(-g);
    Eigen::VectorXd trial = (x + step).cwiseMax(0.0);
    const double trial_cost = step.allFinite() ? cost_of(trial) : std::numeric_limits<double>::infinity();
    if (trial_cost < cost) {
      x = std::move(trial);
      cost = trial_cost;
      lambda = std::max(lambda / 10.0, 1e-15);
      stall = 0;
    } else {
      lambda *= 10.0;
      if (++stall >= cfg.stall_limit || lambda > 1e20) {
        res.diverged = true;
        ++it;
        break;
      }
    }
  }
  res.iterations = it;
  res.residual_norm = cost;
  res.converged = cost < cfg.tolerance;
  res.solution = to_solution(problem, L, x);
  res.solution.lm_converged = res.converged;
  res.solution.lm_iterations = it;
  res.solution.residual_norm = cost;
  res.kkt = kkt_residual(problem, res.solution);
  return res;
}

double system_residual(const AsymptoticProblem& problem, const Solution& sol) {
  const std::size_t k = sol.active_r.size();
  const std::size_t j = sol.active_d.size();
  const double P = problem.power;
  const Layout L{k, j};
  if (k == 0 && j == 0) return 0.0;
  Eigen::VectorXd x(static_cast<Eigen::Index>(L.unknowns()));
  for (std::size_t s = 0; s < k; ++s) {
    x[static_cast<Eigen::Index>(L.pr(s))] = sol.allocation.p_r[s] / P;
    x[static_cast<Eigen::Index>(L.t(s))] = sol.allocation.t[s];
  }
  for (std::size_t i = 0; i < j; ++i) x[static_cast<Eigen::Index>(L.pd(i))] = sol.allocation.p_d[i] / P;
  x[static_cast<Eigen::Index>(L.v())] = sol.v * P;
  if (k) x[static_cast<Eigen::Index>(L.w())] = sol.w;
  return residuals(L, x, scaled(problem.m_r, P), scaled(problem.m_d, P)).norm();
}

Solution lm_cold(const AsymptoticProblem& problem, const LmConfig& cfg) {
  problem.validate();
  const double P = problem.power;
  Solution best = single_path_solution(problem);
  bool any = false;
  for (std::size_t k = 0; k <= problem.cascaded(); ++k) {
    if (k > 0 && !(problem.m_r[k - 1] > 0.0)) break;
    for (std::size_t j = 0; j <= problem.direct(); ++j) {
      if (j > 0 && !(problem.m_d[j - 1] > 0.0)) break;
      if (k == 0 && j == 0) continue;
      Allocation init;
      init.t.assign(problem.cascaded(), 0.0);
      init.p_r.assign(problem.cascaded(), 0.0);
      init.p_d.assign(problem.direct(), 0.0);
      std::vector<double> eff;
      if (k == 0) init.t[0] = 1.0;
      for (std::size_t s = 0; s < k; ++s) {
        init.t[s] = 1.0 / static_cast<double>(k);
        eff.push_back(problem.m_r[s] * init.t[s] * init.t[s]);
      }
      for (std::size_t i = 0; i < j; ++i) eff.push_back(problem.m_d[i]);
      const auto wf = water_filling(eff, P);
      for (std::size_t s = 0; s < k; ++s) init.p_r[s] = wf.p[s];
      for (std::size_t i = 0; i < j; ++i) init.p_d[i] = wf.p[k + i];
      const auto lm = lm_solve(problem, k, j, init, std::nullopt, cfg);
      if (!lm.converged) continue;
      any = true;
      if (better(lm.solution, best)) best = lm.solution;
    }
  }
  if (any) best.method = "lm";
  return best;
}

}  // namespace rispart
