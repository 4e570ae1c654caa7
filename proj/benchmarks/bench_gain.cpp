// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "rispart/partition.hpp"

using namespace rispart;

namespace {

PartitionPlan plan_for(std::size_t ny, std::size_t s) {
  PartitionPlan p;
  for (std::size_t k = 0; k < s; ++k) {
    p.t.push_back(1.0 / static_cast<double>(s));
    p.gradients.push_back(PhaseGradient{0.1 * static_cast<double>(k), -0.2 * static_cast<double>(k), k, k});
    p.psi.push_back(0.3 * static_cast<double>(k));
  }
  p.column_counts = round_partition(p.t, ny).counts;
  return p;
}

void BM_GainClosedForm(benchmark::State& state) {
  const RisGeometry ris{30, static_cast<std::size_t>(state.range(0)), 0.5, 1.0};
  const auto plan = plan_for(ris.ny, 4);
  const PhaseGradient z{0.25, -0.4, 0, 0};
  for (auto _ : state) benchmark::DoNotOptimize(gain_closed_form(plan, ris, z));
}
BENCHMARK(BM_GainClosedForm)->Arg(30)->Arg(90)->Arg(180);

void BM_GainDirectSum(benchmark::State& state) {
  const RisGeometry ris{30, static_cast<std::size_t>(state.range(0)), 0.5, 1.0};
  const auto theta = build_theta(plan_for(ris.ny, 4), ris);
  const PhaseGradient z{0.25, -0.4, 0, 0};
  for (auto _ : state) benchmark::DoNotOptimize(gain_direct_sum(theta, ris, z));
}
BENCHMARK(BM_GainDirectSum)->Arg(30)->Arg(90)->Arg(180);

}  // namespace
