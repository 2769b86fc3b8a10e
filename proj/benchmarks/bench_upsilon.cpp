/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include <benchmark/benchmark.h>

#include "builders.hpp"
#include "covprop/upsilon.hpp"

using namespace covprop;
using namespace covprop::testing;

static void BM_UpsilonCyclic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = cyclic(n);
  const auto b = cyclic(n, q(3, 2));
  for (auto _ : state) benchmark::DoNotOptimize(upsilon(a, b));
}
BENCHMARK(BM_UpsilonCyclic)->DenseRange(2, 6);

static void BM_UpsilonS3Cyclic6(benchmark::State& state) {
  const auto a = s3(1, 2);
  const auto b = cyclic(6, q(1, 2));
  for (auto _ : state) benchmark::DoNotOptimize(upsilon(a, b));
}
BENCHMARK(BM_UpsilonS3Cyclic6);

static void BM_GhPointedLocal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = cyclic(n);
  const auto b = cyclic(n, q(5, 4));
  for (auto _ : state) benchmark::DoNotOptimize(gh_pointed_local(a, b));
}
BENCHMARK(BM_GhPointedLocal)->DenseRange(2, 5);

BENCHMARK_MAIN();
