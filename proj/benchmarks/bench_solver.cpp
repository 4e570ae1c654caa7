// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "rispart/oracle.hpp"
#include "rispart/solver.hpp"
#include "rispart/verify.hpp"

using namespace rispart;

namespace {

std::vector<AsymptoticProblem> problems(std::size_t s, std::size_t l3, std::size_t count) {
  Rng rng(11);
  std::vector<AsymptoticProblem> out;
  while (out.size() < count) {
    auto p = random_problem(rng, s, l3);
    if (p.cascaded() == s) out.push_back(std::move(p));
  }
  return out;
}

void BM_WaterFilling(benchmark::State& state) {
  Rng rng(2);
  std::vector<double> m(static_cast<std::size_t>(state.range(0)));
  for (auto& x : m) x = 1.0 + 100.0 * rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(water_filling(m, 1.0));
}
BENCHMARK(BM_WaterFilling)->Arg(4)->Arg(16)->Arg(64);

void BM_GridSearch(benchmark::State& state) {
  const auto ps = problems(static_cast<std::size_t>(state.range(0)), 4, 16);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(grid_search(ps[i++ % ps.size()]));
}
BENCHMARK(BM_GridSearch)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_LmCold(benchmark::State& state) {
  const auto ps = problems(static_cast<std::size_t>(state.range(0)), 4, 16);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(lm_cold(ps[i++ % ps.size()]));
}
BENCHMARK(BM_LmCold)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SolveP32(benchmark::State& state) {
  const std::vector<double> m{930.0, 740.0, 540.0, 150.0};
  for (auto _ : state) benchmark::DoNotOptimize(solve_p32(m));
}
BENCHMARK(BM_SolveP32);

void BM_BruteForce(benchmark::State& state) {
  const auto ps = problems(2, 1, 4);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_p3(ps[i++ % ps.size()], GridSpec{30, 60}));
}
BENCHMARK(BM_BruteForce)->Unit(benchmark::kMillisecond);

}  // namespace
