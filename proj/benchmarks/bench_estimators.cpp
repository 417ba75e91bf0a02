// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "gpanm/baselines.hpp"
#include "gpanm/regularization.hpp"
#include "support.hpp"

using namespace gpanm;

namespace {

const testing::Instance& default_instance() {
  static const testing::Instance inst = testing::random_instance(10, 5, 3, 7);
  return inst;
}

}  // namespace

static void BM_Estimate(benchmark::State& state) {
  const auto& inst = default_instance();
  GpAnmParams p;
  p.ce = compute_ce(0.15, 10.0, 10);
  p.tau = tau(10, 5, inst.noise_std, p.ce).tau;
  p.k_signals = 3;
  p.grid_step_deg = 0.1;
  p.range_deg = 70.0;
  for (auto _ : state) benchmark::DoNotOptimize(estimate(inst.y, p, inst.config).thetas_deg);
}
BENCHMARK(BM_Estimate)->Unit(benchmark::kMillisecond);

static void BM_Music(benchmark::State& state) {
  const auto& inst = default_instance();
  const GridDictionary grid(inst.config, 0.01, 70.0);
  for (auto _ : state) benchmark::DoNotOptimize(music(inst.y, 3, grid).thetas_deg);
}
BENCHMARK(BM_Music)->Unit(benchmark::kMillisecond);

static void BM_Somp(benchmark::State& state) {
  const auto& inst = default_instance();
  const GridDictionary grid(inst.config, 0.01, 70.0);
  for (auto _ : state) benchmark::DoNotOptimize(somp(inst.y, grid, 3).thetas_deg);
}
BENCHMARK(BM_Somp)->Unit(benchmark::kMillisecond);

static void BM_Refine(benchmark::State& state) {
  const auto& inst = default_instance();
  const double ce = compute_ce(0.15, 10.0, 10);
  for (auto _ : state)
    benchmark::DoNotOptimize(refine(inst.y, inst.scene.thetas(), ce, inst.config, 20, 1e-8).objective);
}
BENCHMARK(BM_Refine)->Unit(benchmark::kMicrosecond);
