/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include <benchmark/benchmark.h>

#include "builders.hpp"
#include "covprop/tunnels.hpp"

using namespace covprop;
using namespace covprop::testing;

static void BM_ReachSelfTunnel(benchmark::State& state) {
  const auto sys = rotation_system(static_cast<std::size_t>(state.range(0)));
  const auto t = self_tunnel(sys, q(1, 4));
  for (auto _ : state) benchmark::DoNotOptimize(reach(sys, sys, t));
}
BENCHMARK(BM_ReachSelfTunnel)->DenseRange(2, 5);

static void BM_ExtentSelfTunnel(benchmark::State& state) {
  const auto sys = rotation_system(static_cast<std::size_t>(state.range(0)));
  const auto t = self_tunnel(sys, q(1, 4));
  for (auto _ : state) benchmark::DoNotOptimize(extent(t));
}
BENCHMARK(BM_ExtentSelfTunnel)->DenseRange(2, 5);

BENCHMARK_MAIN();
