// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "rispart/asymptotic.hpp"
#include "rispart/experiment.hpp"
#include "rispart/finite.hpp"
#include "rispart/solver.hpp"

using namespace rispart;

namespace {

void BM_AdaptSolution(benchmark::State& state) {
  SimulationConfig cfg;
  cfg.mt = cfg.mr = static_cast<std::size_t>(state.range(0));
  const auto channel = draw_realization(cfg, 3);
  const auto pairing = optimal_pairing(cfg.l1, cfg.l2);
  const auto problem = coefficients(channel, pairing, cfg.power_w);
  const auto sol = solve(problem);
  for (auto _ : state) {
    Rng rng(4);
    benchmark::DoNotOptimize(
        adapt_solution(sol, problem, channel, pairing, cfg.ris_geometry(), cfg.tx_geometry(), rng));
  }
}
BENCHMARK(BM_AdaptSolution)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DrawRealization(benchmark::State& state) {
  SimulationConfig cfg;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(draw_realization(cfg, ++seed));
}
BENCHMARK(BM_DrawRealization)->Unit(benchmark::kMillisecond);

}  // namespace
