/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "covprop/rational.hpp"

namespace covprop {

struct TransportPlan {
  Rational cost;
  RationalMatrix flow;  // supply x demand
  std::uint64_t pivots = 0;
};

/// Exact minimum-cost transportation problem
///   min sum c(i,j) x(i,j)  s.t.  row sums = supply, column sums = demand, x >= 0,
/// solved with the transportation simplex (northwest-corner start, u/v
/// potentials, Bland's rule on entering and leaving cells). Supplies and
/// demands must be non-negative with equal totals; throws DomainError
/// "DimensionMismatch" or "UnbalancedTransport" otherwise.
TransportPlan solve_transport(const std::vector<Rational>& supply, const std::vector<Rational>& demand,
                              const RationalMatrix& cost);

/// Exact linear program in equality form:
///   minimize c.x  subject to  A x = b,  x >= 0.
/// Dense two-phase tableau simplex with Bland's rule; sizes here are tiny.
class LinearProgram {
 public:
  enum class Status { Optimal, Infeasible, Unbounded };

  struct Result {
    Status status = Status::Infeasible;
    Rational objective;
    std::vector<Rational> x;
    std::uint64_t pivots = 0;
  };

  std::size_t add_variable(const Rational& cost);
  void add_equality(std::vector<std::pair<std::size_t, Rational>> terms, const Rational& rhs);

  std::size_t num_variables() const { return cost_.size(); }
  std::size_t num_constraints() const { return rows_.size(); }

  Result solve() const;

 private:
  std::vector<Rational> cost_;
  std::vector<std::vector<std::pair<std::size_t, Rational>>> rows_;
  std::vector<Rational> rhs_;
};

}  // namespace covprop
