/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include <benchmark/benchmark.h>

#include "builders.hpp"
#include "covprop/tunnels.hpp"

using namespace covprop;
using namespace covprop::testing;

static void BM_CovpropIsomorphic(benchmark::State& state) {
  const auto sys = rotation_system(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(covprop_upper_bound(sys, sys));
}
BENCHMARK(BM_CovpropIsomorphic)->DenseRange(2, 4);

static void BM_CovpropParityVsTrivial(benchmark::State& state) {
  const auto a = parity_system(2);
  const auto b = trivial_system(two_points(q(3, 2)), cyclic(2));
  for (auto _ : state) benchmark::DoNotOptimize(covprop_upper_bound(a, b));
}
BENCHMARK(BM_CovpropParityVsTrivial);

BENCHMARK_MAIN();
