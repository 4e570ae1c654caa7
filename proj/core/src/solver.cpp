// SPDX-License-Identifier: Apache-2.0

#include "rispart/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace rispart {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRateTie = 1e-12;

double polish_cubic(double p, double inv_v, double c) {
  for (int it = 0; it < 4; ++it) {
    const double f = (p - inv_v) * p * p + c;
    const double df = p * (3.0 * p - 2.0 * inv_v);
    if (df == 0.0) break;
    const double next = p - f / df;
    if (!std::isfinite(next) || std::abs(next - p) <= 1e-16 * std::abs(p)) break;
    p = next;
  }
  return p;
}

// Better-than relation used for every candidate comparison.
bool better(const Solution& a, const Solution& b) {
  if (a.rate > b.rate + kRateTie) return true;
  if (a.rate < b.rate - kRateTie) return false;
  if (a.active_r.size() != b.active_r.size()) return a.active_r.size() < b.active_r.size();
  return a.active_d.size() < b.active_d.size();
}

struct BranchRoot {
  double p = 0.0;
  bool ok = false;
};

// Valid roots split by branch: index 0 below 2/(3v), index 1 at or above.
std::array<BranchRoot, 2> branch_roots(double v, double p_r, double m) {
  std::array<BranchRoot, 2> out{};
  const double split = 2.0 / (3.0 * v);
  for (const auto& root : cubic_roots(v, p_r, m)) {
    if (!root.valid) continue;
    auto& slot = out[root.value < split ? 0 : 1];
    slot.p = root.value;
    slot.ok = true;
  }
  return out;
}

}  // namespace

WaterFilling water_filling(std::span<const double> m, double budget) {
  if (m.empty()) throw std::invalid_argument("water_filling: empty coefficient list");
  if (!(budget >= 0.0)) throw std::invalid_argument("water_filling: budget must be non-negative");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] > 0.0) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return m[a] > m[b]; });

  WaterFilling out;
  out.p.assign(m.size(), 0.0);
  if (idx.empty()) {
    out.p[0] = budget;
    return out;
  }
  double level = 1.0 / m[idx[0]];
  std::size_t active = 1;
  double inv_sum = 0.0;
  for (std::size_t k = 1; k <= idx.size(); ++k) {
    inv_sum += 1.0 / m[idx[k - 1]];
    const double candidate = (budget + inv_sum) / static_cast<double>(k);
    if (candidate <= 1.0 / m[idx[k - 1]]) break;
    level = candidate;
    active = k;
  }
  if (budget == 0.0) {
    out.v = m[idx[0]];
    return out;
  }
  for (std::size_t k = 0; k < active; ++k) out.p[idx[k]] = level - 1.0 / m[idx[k]];
  out.v = 1.0 / level;
  return out;
}

std::vector<CubicRoot> cubic_roots(double v, double p_r, double m) {
  if (!(v > 0.0) || !(m > 0.0) || !(p_r >= 0.0)) throw std::invalid_argument("cubic_roots: need v > 0, m > 0, P_r >= 0");
  const double inv_v = 1.0 / v;
  const double c = p_r * p_r / m;
  // Depressed form with p = x + 1/(3v): x^3 + a x + b = 0.
  const double shift = inv_v / 3.0;
  const double a = -inv_v * inv_v / 3.0;
  const double b = -2.0 * inv_v * inv_v * inv_v / 27.0 + c;
  std::vector<double> roots;
  const double disc = b * b / 4.0 + a * a * a / 27.0;
  if (disc <= 0.0) {
    const double r = 2.0 * std::sqrt(-a / 3.0);
    double arg = (3.0 * b / (a * r));
    arg = std::clamp(arg, -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) roots.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) + shift);
  } else {
    const double sq = std::sqrt(disc);
    roots.push_back(std::cbrt(-b / 2.0 + sq) + std::cbrt(-b / 2.0 - sq) + shift);
  }
  std::vector<CubicRoot> out;
  const double floor_value = std::max(4.0 * v * v * p_r * p_r / m, 0.5 * inv_v);
  for (double r : roots) {
    CubicRoot cr;
    cr.value = polish_cubic(r, inv_v, c);
    cr.valid = cr.value >= floor_value * (1.0 - 1e-12);
    out.push_back(cr);
  }
  std::sort(out.begin(), out.end(), [](const CubicRoot& x, const CubicRoot& y) { return x.value < y.value; });
  return out;
}

std::vector<double> pattern_partition(std::span<const double> m, const Pattern& pattern, double w) {
  if (pattern.size() != m.size()) throw std::invalid_argument("pattern_partition: pattern length mismatch");
  std::vector<double> t(m.size(), 0.0);
  for (std::size_t s = 0; s < m.size(); ++s) {
    if (pattern[s] == Label::Zero) continue;
    const double root = std::sqrt(std::max(0.0, 1.0 / (w * w) - 1.0 / m[s]));
    t[s] = 1.0 / w + (pattern[s] == Label::Plus ? root : -root);
  }
  return t;
}

std::vector<double> pattern_solutions(std::span<const double> m, const Pattern& pattern) {
  if (pattern.size() != m.size()) throw std::invalid_argument("pattern_solutions: pattern length mismatch");
  double min_m = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < m.size(); ++s)
    if (pattern[s] != Label::Zero) min_m = std::min(min_m, m[s]);
  if (!std::isfinite(min_m) || !(min_m > 0.0)) return {};
  const double w_max = std::sqrt(min_m);
  auto f = [&](double w) {
    const auto t = pattern_partition(m, pattern, w);
    return std::accumulate(t.begin(), t.end(), 0.0) - 1.0;
  };
  std::vector<double> out;
  constexpr int kScan = 4000;
  const double w_min = w_max * 1e-9;
  double prev_w = w_min;
  double prev_f = f(prev_w);
  for (int i = 1; i <= kScan; ++i) {
    const double w = w_min * std::pow(w_max / w_min, static_cast<double>(i) / kScan);
    const double fw = f(w);
    if (fw == 0.0) {
      out.push_back(w);
    } else if ((prev_f < 0.0) != (fw < 0.0) && prev_f != 0.0) {
      double lo = prev_w;
      double hi = w;
      double flo = prev_f;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      out.push_back(0.5 * (lo + hi));
    }
    prev_w = w;
    prev_f = fw;
  }
  return out;
}

P32Result solve_p32(std::span<const double> m) {
  if (m.empty()) throw std::invalid_argument("solve_p32: empty input");
  for (std::size_t s = 0; s < m.size(); ++s) {
    if (!(m[s] > 0.0)) throw std::invalid_argument("solve_p32: coefficients must be positive");
    if (s && m[s] > m[s - 1]) throw std::invalid_argument("solve_p32: coefficients must be sorted non-increasing");
  }
  const std::size_t n = m.size();
  auto objective = [&](const std::vector<double>& t) {
    double c = 0.0;
    for (std::size_t s = 0; s < n; ++s) c += std::log2(1.0 + m[s] * t[s] * t[s]);
    return c;
  };

  P32Result res;
  res.exists.assign(n, false);
  res.candidate_rate.assign(n, kNaN);
  res.exists[0] = true;
  res.t.assign(n, 0.0);
  res.t[0] = 1.0;
  res.w = 2.0 * m[0] / (1.0 + m[0]);
  res.plus_count = 1;
  res.rate = objective(res.t);
  res.candidate_rate[0] = res.rate;

  for (std::size_t k = 2; k <= n; ++k) {
    auto f = [&](double w) {
      double sum = 0.0;
      for (std::size_t s = 0; s < k; ++s) sum += 1.0 / w + std::sqrt(std::max(0.0, 1.0 / (w * w) - 1.0 / m[s]));
      return sum;
    };
    const double w_hi = std::sqrt(m[k - 1]);
    if (f(w_hi) > 1.0) continue;
    res.exists[k - 1] = true;
    double lo = 0.0;
    double hi = w_hi;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if (f(mid) > 1.0)
        lo = mid;
      else
        hi = mid;
    }
    const double w = 0.5 * (lo + hi);
    std::vector<double> t(n, 0.0);
    double total = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
      t[s] = 1.0 / w + std::sqrt(std::max(0.0, 1.0 / (w * w) - 1.0 / m[s]));
      total += t[s];
    }
    for (double& x : t) x /= total;
    const double c = objective(t);
    res.candidate_rate[k - 1] = c;
    if (c > res.rate + kRateTie) {
      res.rate = c;
      res.t = std::move(t);
      res.w = w;
      res.plus_count = k;
    }
  }
  return res;
}

std::pair<double, double> search_bounds(std::size_t k, std::size_t j, std::span<const double> m_r,
                                        std::span<const double> m_d, double power) {
  if (k > m_r.size() || j > m_d.size()) throw std::invalid_argument("search_bounds: block exceeds path counts");
  double inv_d = 0.0;
  for (std::size_t i = 0; i < j; ++i) inv_d += 1.0 / m_d[i];
  double inv_r = 0.0;
  for (std::size_t s = 0; s < k; ++s) inv_r += 1.0 / m_r[s];
  const double jd = static_cast<double>(j);
  const double lower = std::max(jd / (power + inv_d), 1.0 / (2.0 * power));
  double upper = (jd + static_cast<double>(k)) / (power + inv_d + inv_r);
  if (j > 0) upper = std::min(upper, m_d[j - 1]);
  return {lower, upper};
}

void finalize_solution(const AsymptoticProblem& problem, Solution& sol) {
  const double tol = 1e-12 * problem.power;
  sol.active_r.clear();
  sol.active_d.clear();
  for (std::size_t s = 0; s < problem.cascaded(); ++s)
    if (sol.allocation.p_r[s] > tol && sol.allocation.t[s] > 1e-12) sol.active_r.push_back(s);
  for (std::size_t i = 0; i < problem.direct(); ++i)
    if (sol.allocation.p_d[i] > tol) sol.active_d.push_back(i);
  sol.s_min_star = sol.active_r.size();
  sol.rate = rate_unchecked(problem.m_r, problem.m_d, sol.allocation);
}

Solution single_path_solution(const AsymptoticProblem& problem) {
  problem.validate();
  std::vector<double> m{problem.m_r[0]};
  m.insert(m.end(), problem.m_d.begin(), problem.m_d.end());
  const auto wf = water_filling(m, problem.power);
  Solution sol;
  sol.allocation.p_r.assign(problem.cascaded(), 0.0);
  sol.allocation.t.assign(problem.cascaded(), 0.0);
  sol.allocation.p_r[0] = wf.p[0];
  sol.allocation.t[0] = 1.0;
  sol.allocation.p_d.assign(wf.p.begin() + 1, wf.p.end());
  sol.v = wf.v;
  sol.w = 2.0 * wf.v * wf.p[0];
  sol.method = "single";
  finalize_solution(problem, sol);
  return sol;
}

Solution grid_search(const AsymptoticProblem& problem, const GridSearchConfig& cfg) {
  problem.validate();
  if (!(cfg.accuracy > 0.0) || cfg.grid_size < 0.0 || (cfg.grid_size == 0.0 && cfg.points == 0))
    throw std::invalid_argument("grid_search: grid size and accuracy must be positive");
  const double P = problem.power;
  std::vector<double> mr(problem.m_r);
  std::vector<double> md(problem.m_d);
  for (double& x : mr) x *= P;
  for (double& x : md) x *= P;

  Solution best = single_path_solution(problem);
  best.method = "grid";

  auto consider = [&](double v, std::size_t k, std::size_t j, std::vector<double> p) {
    Allocation a;
    a.p_d.assign(md.size(), 0.0);
    double pd_sum = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      a.p_d[i] = 1.0 / v - 1.0 / md[i];
      if (a.p_d[i] < 0.0) return;
      pd_sum += a.p_d[i];
    }
    const double p_r_total = 1.0 - pd_sum;
    if (!(p_r_total > 0.0)) return;
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    a.p_r.assign(mr.size(), 0.0);
    a.t.assign(mr.size(), 0.0);
    for (std::size_t s = 0; s < k; ++s) {
      a.p_r[s] = p[s] * p_r_total / sum;
      a.t[s] = p[s] / sum;
    }
    Solution cand;
    for (double& x : a.p_r) x *= P;
    for (double& x : a.p_d) x *= P;
    cand.allocation = std::move(a);
    cand.v = v / P;
    cand.w = 2.0 * v * p_r_total;
    cand.method = "grid";
    finalize_solution(problem, cand);
    if (better(cand, best)) best = std::move(cand);
  };

  const std::size_t S = mr.size();
  for (std::size_t k = 2; k <= S; ++k) {
    if (!(mr[k - 1] > 0.0)) break;
    for (std::size_t j = 0; j <= md.size(); ++j) {
      if (j > 0 && !(md[j - 1] > 0.0)) break;
      const auto [lo, hi] = search_bounds(k, j, mr, md, 1.0);
      if (!(hi > lo)) continue;
      const double step = cfg.grid_size > 0.0 ? cfg.grid_size * P : (hi - lo) / static_cast<double>(cfg.points);
      const std::size_t masks = std::size_t{1} << k;

      // Budget residual of one branch combination at v; NaN when unavailable.
      auto residual = [&](double v, std::size_t mask, std::vector<double>* p_out) {
        double pd_sum = 0.0;
        for (std::size_t i = 0; i < j; ++i) pd_sum += 1.0 / v - 1.0 / md[i];
        const double p_r_total = 1.0 - pd_sum;
        if (!(p_r_total > 0.0)) return kNaN;
        double sum = 0.0;
        if (p_out) p_out->assign(k, 0.0);
        for (std::size_t s = 0; s < k; ++s) {
          const auto roots = branch_roots(v, p_r_total, mr[s]);
          const auto& r = roots[(mask >> s) & 1u];
          if (!r.ok) return kNaN;
          sum += r.p;
          if (p_out) (*p_out)[s] = r.p;
        }
        return sum - p_r_total;
      };

      std::vector<double> prev(masks, kNaN);
      double prev_v = lo;
      const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / step));
      std::vector<double> p;
      for (std::size_t g = 0; g <= steps; ++g) {
        const double v = std::min(hi, lo + static_cast<double>(g) * step);
        for (std::size_t mask = 0; mask < masks; ++mask) {
          const double r = residual(v, mask, &p);
          if (std::isnan(r)) {
            prev[mask] = kNaN;
            continue;
          }
          if (std::abs(r) < cfg.accuracy) consider(v, k, j, p);
          if (cfg.refine && !std::isnan(prev[mask]) && ((prev[mask] < 0.0) != (r < 0.0))) {
            double a = prev_v;
            double b = v;
            double ra = prev[mask];
            bool ok = true;
            for (int it = 0; it < 100 && b - a > 1e-15 * b; ++it) {
              const double mid = 0.5 * (a + b);
              const double rm = residual(mid, mask, nullptr);
              if (std::isnan(rm)) {
                ok = false;
                break;
              }
              if ((rm < 0.0) == (ra < 0.0)) {
                a = mid;
                ra = rm;
              } else {
                b = mid;
              }
            }
            const double vm = 0.5 * (a + b);
            if (ok && !std::isnan(residual(vm, mask, &p))) consider(vm, k, j, p);
          }
          prev[mask] = r;
        }
        prev_v = v;
      }
    }
  }
  return best;
}

double KktResidual::max_stationarity() const {
  double m = 0.0;
  for (const auto* vec : {&stationarity_p_r, &stationarity_p_d, &stationarity_t})
    for (double x : *vec) m = std::max(m, std::abs(x));
  return m;
}

double KktResidual::max_slackness() const {
  double m = 0.0;
  for (const auto* vec : {&slackness_p_r, &slackness_p_d, &slackness_t})
    for (double x : *vec) m = std::max(m, std::abs(x));
  return m;
}

double KktResidual::max_abs() const {
  return std::max({max_stationarity(), max_slackness(), budget_violation, simplex_violation, sign_violation});
}

KktResidual kkt_residual(const AsymptoticProblem& problem, const Solution& sol) {
  const auto& a = sol.allocation;
  KktResidual k;
  const double tol = 1e-12;
  double psum = 0.0;
  double tsum = 0.0;
  double most_negative = 0.0;
  auto entry = [&](double x, double grad, double dual, std::vector<double>& st, std::vector<double>& sl) {
    const double lambda = dual - grad;
    st.push_back(x > tol ? grad - dual : std::max(0.0, grad - dual));
    sl.push_back(x * lambda);
    most_negative = std::min(most_negative, x);
  };
  for (std::size_t s = 0; s < problem.cascaded(); ++s) {
    const double m = problem.m_r[s];
    const double p = a.p_r[s];
    const double t = a.t[s];
    const double den = 1.0 + m * p * t * t;
    entry(p, m * t * t / den, sol.v, k.stationarity_p_r, k.slackness_p_r);
    entry(t, 2.0 * m * p * t / den, sol.w, k.stationarity_t, k.slackness_t);
    psum += p;
    tsum += t;
  }
  for (std::size_t i = 0; i < problem.direct(); ++i) {
    const double m = problem.m_d[i];
    const double p = a.p_d[i];
    entry(p, m / (1.0 + m * p), sol.v, k.stationarity_p_d, k.slackness_p_d);
    psum += p;
  }
  k.budget_violation = std::abs(psum - problem.power) / problem.power;
  k.simplex_violation = std::abs(tsum - 1.0);
  k.sign_violation = -most_negative;
  return k;
}

Solution solve(const AsymptoticProblem& problem, const SolveConfig& cfg) {
  problem.validate();
  Solution sol;
  if (cfg.kind == SolverKind::Lm) {
    sol = lm_cold(problem, cfg.lm);
    if (sol.method != "lm") sol = grid_search(problem, cfg.grid);
  } else {
    sol = grid_search(problem, cfg.grid);
    if (cfg.kind == SolverKind::Both && !(sol.active_r.empty() && sol.active_d.empty())) {
      const std::size_t k = sol.active_r.size();
      const std::size_t j = sol.active_d.size();
      const auto lm = lm_solve(problem, k, j, sol.allocation, std::make_pair(sol.v, sol.w), cfg.lm);
      if (lm.converged && lm.solution.rate >= sol.rate - 1e-9 * std::max(1.0, std::abs(sol.rate))) {
        sol = lm.solution;
        sol.method = "grid+lm";
      }
    }
  }

  const auto& a = sol.allocation;
  double p_r_total = 0.0;
  for (std::size_t s : sol.active_r) p_r_total += a.p_r[s];
  sol.proportional_ok = true;
  for (std::size_t s : sol.active_r)
    if (std::abs(a.t[s] - a.p_r[s] / p_r_total) >= 1e-6) sol.proportional_ok = false;
  sol.ordered_ok = true;
  for (std::size_t s = 1; s < problem.cascaded(); ++s) {
    if (a.t[s] > a.t[s - 1] + 1e-9 || a.p_r[s] > a.p_r[s - 1] + 1e-9 * problem.power) sol.ordered_ok = false;
  }
  return sol;
}

}  // namespace rispart
