/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include <benchmark/benchmark.h>

#include "builders.hpp"
#include "covprop/qcms.hpp"

using namespace covprop;
using namespace covprop::testing;

static void BM_W1Line(benchmark::State& state) {
  const auto n = static_cast<long>(state.range(0));
  std::vector<Rational> pos;
  for (long i = 0; i < n; ++i) pos.push_back(q(i * i, n));
  const auto x = line(pos);
  State mu(n, q(1, n)), nu(n, 0);
  nu[0] = q(1, 2);
  nu[n - 1] = q(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(w1(x, mu, nu));
}
BENCHMARK(BM_W1Line)->RangeMultiplier(2)->Range(2, 16);

static void BM_W1Dirac(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = rotation_system(n).space;
  const auto mu = dirac(n, 0), nu = dirac(n, n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(w1(x, mu, nu));
}
BENCHMARK(BM_W1Dirac)->RangeMultiplier(2)->Range(2, 16);

BENCHMARK_MAIN();
