// SPDX-License-Identifier: Apache-2.0

#include "rispart/fig3.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "rispart/solver.hpp"

namespace rispart {
namespace {

// First SNR in (lo, hi] where pred flips from false to true.
double bisect_threshold(double lo, double hi, const std::function<bool(double)>& pred) {
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> scaled_coefficients(std::span<const double> m, double snr_db) {
  const double snr = std::pow(10.0, snr_db / 10.0);
  std::vector<double> out;
  for (double x : m) out.push_back(x * snr);
  return out;
}

Fig3Report fig3_regions(std::span<const double> m, double lo, double hi, double step) {
  if (m.empty()) throw std::invalid_argument("fig3_regions: empty coefficient vector");
  for (std::size_t s = 1; s < m.size(); ++s)
    if (m[s] > m[s - 1]) throw std::invalid_argument("fig3_regions: coefficients must be sorted non-increasing");
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("fig3_regions: bad SNR range");

  const std::size_t all = m.size();
  auto exists_all = [&](double snr) -> bool { return solve_p32(scaled_coefficients(m, snr)).exists[all - 1]; };
  auto optimal_all = [&](double snr) -> bool { return solve_p32(scaled_coefficients(m, snr)).plus_count == all; };

  Fig3Report rep;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) {
    const double snr = lo + static_cast<double>(i) * step;
    const auto r = solve_p32(scaled_coefficients(m, snr));
    Fig3Row row;
    row.snr_db = snr;
    row.exists = r.exists;
    row.optimal = r.plus_count;
    row.t = r.t;
    row.rate = r.rate;
    if (!rep.rows.empty()) {
      const auto& prev = rep.rows.back();
      if (!rep.existence_threshold_db && !prev.exists[all - 1] && row.exists[all - 1])
        rep.existence_threshold_db = bisect_threshold(prev.snr_db, snr, exists_all);
      if (!rep.optimality_threshold_db && prev.optimal != all && row.optimal == all)
        rep.optimality_threshold_db = bisect_threshold(prev.snr_db, snr, optimal_all);
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace rispart
