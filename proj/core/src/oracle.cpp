// SPDX-License-Identifier: Apache-2.0

#include "rispart/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace rispart {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// best[q] = max over splits of q units across channels of sum log2(1 + a_c q_c delta).
struct MaxPlus {
  std::vector<double> value;
  std::vector<std::vector<std::size_t>> choice;  // per channel, units given at each total
};

MaxPlus max_plus(std::span<const double> gains, std::size_t units, double delta) {
  MaxPlus out;
  out.value.assign(units + 1, 0.0);
  for (double a : gains) {
    std::vector<double> g(units + 1);
    for (std::size_t q = 0; q <= units; ++q) g[q] = std::log2(1.0 + a * static_cast<double>(q) * delta);
    std::vector<double> next(units + 1, kNegInf);
    std::vector<std::size_t> pick(units + 1, 0);
    for (std::size_t q = 0; q <= units; ++q) {
      for (std::size_t c = 0; c <= q; ++c) {
        const double v = out.value[q - c] + g[c];
        if (v > next[q]) {
          next[q] = v;
          pick[q] = c;
        }
      }
    }
    out.value = std::move(next);
    out.choice.push_back(std::move(pick));
  }
  return out;
}

std::vector<std::size_t> backtrack(const MaxPlus& mp, std::size_t q) {
  std::vector<std::size_t> units(mp.choice.size(), 0);
  for (std::size_t c = mp.choice.size(); c-- > 0;) {
    units[c] = mp.choice[c][q];
    q -= units[c];
  }
  return units;
}

void floor_to_lattice(std::vector<double>& x, double total, std::size_t resolution) {
  if (x.empty()) return;
  const double unit = total / static_cast<double>(resolution);
  std::size_t used = 0;
  std::size_t largest = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > x[largest]) largest = i;
  }
  std::vector<std::size_t> q(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    q[i] = static_cast<std::size_t>(std::floor(std::max(0.0, x[i]) / unit + 1e-9));
    used += q[i];
  }
  used = std::min(used, resolution);
  q[largest] += resolution - used;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(q[i]) * unit;
}

}  // namespace

void GridSpec::validate() const {
  if (t_resolution < 8 || p_resolution < 8) throw std::invalid_argument("GridSpec: need at least 8 points per dimension");
}

OracleResult brute_force_p3(const AsymptoticProblem& problem, const GridSpec& grid) {
  problem.validate();
  grid.validate();
  const std::size_t S = problem.cascaded();
  const std::size_t L3 = problem.direct();
  if (S > 3 || L3 > 2) throw std::invalid_argument("brute_force_p3: limited to 3 cascaded and 2 direct paths");
  const std::size_t Rt = grid.t_resolution;
  const std::size_t Rp = grid.p_resolution;
  const double delta = problem.power / static_cast<double>(Rp);

  const MaxPlus direct = max_plus(problem.m_d, Rp, delta);

  OracleResult best;
  best.rate = kNegInf;
  std::vector<std::size_t> tq(S, 0);
  std::vector<double> gains(S);

  // Enumerate compositions of Rt into S parts.
  auto visit = [&]() {
    for (std::size_t s = 0; s < S; ++s) {
      const double t = static_cast<double>(tq[s]) / static_cast<double>(Rt);
      gains[s] = problem.m_r[s] * t * t;
    }
    const MaxPlus cascaded = max_plus(gains, Rp, delta);
    for (std::size_t q = 0; q <= Rp; ++q) {
      const double c = cascaded.value[q] + direct.value[Rp - q];
      if (c > best.rate) {
        best.rate = c;
        const auto ur = backtrack(cascaded, q);
        const auto ud = backtrack(direct, Rp - q);
        best.allocation.p_r.assign(S, 0.0);
        best.allocation.p_d.assign(L3, 0.0);
        best.allocation.t.assign(S, 0.0);
        for (std::size_t s = 0; s < S; ++s) {
          best.allocation.p_r[s] = static_cast<double>(ur[s]) * delta;
          best.allocation.t[s] = static_cast<double>(tq[s]) / static_cast<double>(Rt);
        }
        for (std::size_t i = 0; i < L3; ++i) best.allocation.p_d[i] = static_cast<double>(ud[i]) * delta;
      }
    }
  };

  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t s, std::size_t left) {
    if (s + 1 == S) {
      tq[s] = left;
      visit();
      return;
    }
    for (std::size_t q = 0; q <= left; ++q) {
      tq[s] = q;
      rec(s + 1, left - q);
    }
  };
  rec(0, Rt);
  return best;
}

Allocation lattice_round(const Allocation& a, double power, const GridSpec& grid) {
  Allocation out = a;
  floor_to_lattice(out.t, 1.0, grid.t_resolution);
  std::vector<double> p(a.p_r);
  p.insert(p.end(), a.p_d.begin(), a.p_d.end());
  floor_to_lattice(p, power, grid.p_resolution);
  std::copy(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(a.p_r.size()), out.p_r.begin());
  std::copy(p.begin() + static_cast<std::ptrdiff_t>(a.p_r.size()), p.end(), out.p_d.begin());
  return out;
}

double resolution_bound(const AsymptoticProblem& problem, const Allocation& a, const GridSpec& grid) {
  const Allocation r = lattice_round(a, problem.power, grid);
  return std::max(0.0, rate_unchecked(problem.m_r, problem.m_d, a) - rate_unchecked(problem.m_r, problem.m_d, r));
}

std::vector<PairingRate> enumerate_pairings(std::span<const cd> alpha, std::span<const cd> beta,
                                            std::span<const cd> gamma, const CoefficientScale& scale, double power,
                                            const ProblemSolver& solver) {
  const std::size_t l1 = alpha.size();
  const std::size_t l2 = beta.size();
  if (l1 == 0 || l2 == 0) throw std::invalid_argument("enumerate_pairings: empty path set");
  if (std::min(l1, l2) > 4) throw std::invalid_argument("enumerate_pairings: limited to min(L1, L2) <= 4");
  const bool rows_short = l1 <= l2;
  const std::size_t small = std::min(l1, l2);
  const std::size_t large = std::max(l1, l2);

  std::vector<PairingRate> table;
  std::vector<std::size_t> pick(small);
  std::vector<bool> used(large, false);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == small) {
      PairingRate row;
      row.sorted = true;
      for (std::size_t a = 0; a < small; ++a) {
        row.pairs.emplace_back(rows_short ? a : pick[a], rows_short ? pick[a] : a);
        if (pick[a] != a) row.sorted = false;
      }
      std::sort(row.pairs.begin(), row.pairs.end());
      const auto b = PairingMatrix::from_pairs(l1, l2, row.pairs);
      row.rate = solver(coefficients(alpha, beta, gamma, b, scale, power));
      table.push_back(std::move(row));
      return;
    }
    for (std::size_t c = 0; c < large; ++c) {
      if (used[c]) continue;
      used[c] = true;
      pick[i] = c;
      rec(i + 1);
      used[c] = false;
    }
  };
  rec(0);
  std::stable_sort(table.begin(), table.end(), [](const PairingRate& x, const PairingRate& y) { return x.rate > y.rate; });
  return table;
}

PsiResult exhaustive_psi(const FiniteEvaluation& e, std::size_t grid_points) {
  const std::size_t S = e.blocks.size();
  if (S > 2) throw std::invalid_argument("exhaustive_psi: limited to two sub-surfaces");
  if (grid_points == 0) throw std::invalid_argument("exhaustive_psi: need at least one grid point");
  PsiResult best;
  best.psi = e.plan.psi;
  best.rate = rate_for_psi(e, best.psi);
  if (S == 0 || grid_points == 1) return best;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> psi(S);
  std::size_t total = 1;
  for (std::size_t s = 0; s < S; ++s) total *= grid_points;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t s = 0; s < S; ++s) {
      const double off = two_pi * static_cast<double>(rem % grid_points) / static_cast<double>(grid_points);
      rem /= grid_points;
      psi[s] = std::fmod(e.plan.psi[s] + off, two_pi);
    }
    const double c = rate_for_psi(e, psi);
    if (c > best.rate) {
      best.rate = c;
      best.psi = psi;
    }
  }
  return best;
}

}  // namespace rispart
