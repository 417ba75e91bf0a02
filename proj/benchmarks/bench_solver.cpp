// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "gpanm/estimator.hpp"
#include "gpanm/regularization.hpp"
#include "support.hpp"

using namespace gpanm;

// One GP-ANM SDP solve at N antennas, P = 5, K = 3.
static void BM_GpAnmSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto inst = testing::random_instance(n, 5, 3, 1);
  GpAnmParams p;
  p.ce = compute_ce(0.15, 10.0, n);
  p.tau = tau(n, 5, inst.noise_std, p.ce).tau;
  const GpAnmProgram prog = build_sdp(inst.y, p);
  int iters = 0;
  for (auto _ : state) {
    const auto sol = sdp::solve(prog.problem, p.solver);
    iters = sol.iterations;
    benchmark::DoNotOptimize(sol.objective_value);
  }
  state.counters["admm_iters"] = iters;
}
BENCHMARK(BM_GpAnmSolve)->Arg(6)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_PsdProject(benchmark::State& state) {
  const auto d = state.range(0);
  RMatrix s = RMatrix::Random(d, d);
  s = 0.5 * (s + s.transpose()).eval();
  for (auto _ : state) benchmark::DoNotOptimize(sdp::psd_project(s));
}
BENCHMARK(BM_PsdProject)->Arg(20)->Arg(30)->Arg(60);
