/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include <random>

#include "covprop/errors.hpp"
#include "covprop/transport.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace covprop;

namespace {

std::vector<Rational> random_mass(std::mt19937_64& rng, std::size_t n, long den) {
  // random composition of `den` into n parts, some possibly zero
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<long> c(n, 0);
  for (long i = 0; i < den; ++i) ++c[pick(rng)];
  std::vector<Rational> out;
  for (auto v : c) out.push_back(make_rational(v, den));
  return out;
}

}  // namespace

TEST_CASE("transport: tiny instances by hand") {
  RationalMatrix cost(2, 2);
  cost(0, 1) = 1;
  cost(1, 0) = 1;
  const auto p = solve_transport({Rational(1), Rational(0)}, {Rational(0), Rational(1)}, cost);
  CHECK(p.cost == 1);
  CHECK(p.flow(0, 1) == 1);
  const auto u = solve_transport({make_rational(1, 2), make_rational(1, 2)}, {Rational(1), Rational(0)}, cost);
  CHECK(u.cost == make_rational(1, 2));
}

TEST_CASE("transport: errors") {
  RationalMatrix cost(2, 2);
  CHECK_THROWS_WITH_AS(solve_transport({Rational(1), Rational(0)}, {make_rational(1, 2), Rational(0)}, cost),
                       doctest::Contains("UnbalancedTransport"), DomainError);
  CHECK_THROWS_WITH_AS(solve_transport({Rational(1)}, {Rational(1), Rational(0)}, cost),
                       doctest::Contains("DimensionMismatch"), DomainError);
  CHECK_THROWS_AS(solve_transport({Rational(2), Rational(-1)}, {Rational(1), Rational(0)}, cost), DomainError);
}

TEST_CASE("transport simplex matches the generic LP on random instances") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> c(0, 9);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 4, m = 1 + (trial / 4) % 4;
    RationalMatrix cost(n, m);
    std::vector<std::vector<Rational>> d(n, std::vector<Rational>(m));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) d[i][j] = cost(i, j) = make_rational(c(rng), 3);
    const auto s = random_mass(rng, n, 6);
    const auto t = random_mass(rng, m, 6);
    const auto plan = solve_transport(s, t, cost);
    CHECK(plan.cost == oracle::w1_lp(d, s, t));
    // the plan is a feasible coupling with the reported cost
    Rational total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Rational row = 0;
      for (std::size_t j = 0; j < m; ++j) {
        CHECK(plan.flow(i, j) >= 0);
        row += plan.flow(i, j);
        total += plan.flow(i, j) * cost(i, j);
      }
      CHECK(row == s[i]);
    }
    for (std::size_t j = 0; j < m; ++j) {
      Rational col = 0;
      for (std::size_t i = 0; i < n; ++i) col += plan.flow(i, j);
      CHECK(col == t[j]);
    }
    CHECK(total == plan.cost);
  }
}

TEST_CASE("linear program statuses") {
  LinearProgram lp;
  const auto x = lp.add_variable(1);
  const auto y = lp.add_variable(2);
  lp.add_equality({{x, 1}, {y, 1}}, 3);
  auto r = lp.solve();
  CHECK(r.status == LinearProgram::Status::Optimal);
  CHECK(r.objective == 3);

  LinearProgram bad;
  const auto a = bad.add_variable(0);
  bad.add_equality({{a, 1}}, -1);
  CHECK(bad.solve().status == LinearProgram::Status::Infeasible);

  LinearProgram unb;
  const auto u = unb.add_variable(-1);
  const auto v = unb.add_variable(0);
  unb.add_equality({{u, 1}, {v, -1}}, 0);
  CHECK(unb.solve().status == LinearProgram::Status::Unbounded);

  // redundant equality rows
  LinearProgram red;
  const auto p = red.add_variable(1);
  const auto qv = red.add_variable(1);
  red.add_equality({{p, 1}, {qv, 1}}, 1);
  red.add_equality({{p, 2}, {qv, 2}}, 2);
  r = red.solve();
  CHECK(r.status == LinearProgram::Status::Optimal);
  CHECK(r.objective == 1);
}
