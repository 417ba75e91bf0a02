// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "gpanm/crlb.hpp"

using namespace gpanm;

static void BM_Fim(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  RVector th(3), g(n), phi(n);
  th << -0.5, 0.1, 0.7;
  for (int i = 0; i < n; ++i) {
    g[i] = 0.1 * std::sin(i + 1.0);
    phi[i] = 0.1 * std::cos(i + 1.0);
  }
  const auto s = make_crlb_scenario(UlaConfig(n), th, g, phi, p, 1.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(fim(s).crlb_diag);
}
BENCHMARK(BM_Fim)->Args({10, 5})->Args({10, 20})->Args({16, 5})->Unit(benchmark::kMillisecond);
