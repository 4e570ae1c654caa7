// SPDX-License-Identifier: Apache-2.0
//
// Region map of the optimal partition pattern versus transmit SNR when every
// paired path gets the same power: m_tilde_s = m_s * SNR (linear).

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rispart {

struct Fig3Row {
  double snr_db = 0.0;
  std::vector<bool> exists;  // exists[k-1]: pattern with k leading plus labels
  std::size_t optimal = 1;   // leading plus labels of the optimum
  std::vector<double> t;
  double rate = 0.0;
};

struct Fig3Report {
  std::vector<Fig3Row> rows;
  /// SNR (dB) where the all-plus pattern first exists / first becomes optimal, bisected to 1e-6 dB.
  std::optional<double> existence_threshold_db;
  std::optional<double> optimality_threshold_db;
};

std::vector<double> scaled_coefficients(std::span<const double> m, double snr_db);

Fig3Report fig3_regions(std::span<const double> m, double snr_lo_db, double snr_hi_db, double step_db);

}  // namespace rispart
