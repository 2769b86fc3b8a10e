/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "covprop/monoid.hpp"
#include "covprop/rational.hpp"
#include "covprop/transport.hpp"

namespace covprop {

/// A finite metric space standing for the algebra of functions on its
/// points with the Lipschitz seminorm.
class FiniteQCMS {
 public:
  /// Checks the metric axioms; throws DomainError "NotAMetric" with a witness
  /// (one or three point indices) on the first failure.
  static FiniteQCMS validate(std::vector<std::string> points, std::vector<std::vector<Rational>> dist);

  std::size_t size() const { return points_.size(); }
  const Rational& dist(std::size_t x, std::size_t y) const { return dist_[x][y]; }
  const std::vector<std::vector<Rational>>& dist_matrix() const { return dist_; }
  const std::string& name(std::size_t x) const { return points_[x]; }
  const std::vector<std::string>& names() const { return points_; }
  /// Throws ParseError if absent.
  std::size_t index_of(const std::string& name) const;
  Rational diameter() const;
  RationalMatrix cost_matrix() const;

 private:
  std::vector<std::string> points_;
  std::vector<std::vector<Rational>> dist_;
};

/// Probability vector over the points of a space.
using State = std::vector<Rational>;

/// Throws DomainError "InvalidState" unless weights are non-negative and sum to 1,
/// "DimensionMismatch" if the length is wrong.
void validate_state(const FiniteQCMS& space, const State& state);

State dirac(std::size_t size, std::size_t point);

/// Lipschitz constant max |a(x) - a(y)| / d(x, y); 0 on a one-point space.
Rational lipschitz_constant(const FiniteQCMS& space, const std::vector<Rational>& a);

/// Row-stochastic kernel of a unital positive map C(src) -> C(dst): rows are
/// destination points, columns source points, and (alpha a)(x) = sum_y K(x,y) a(y).
/// Composition alpha o beta has kernel K_alpha * K_beta.
using MarkovMap = RationalMatrix;

/// Throws DomainError "NotStochastic" (witness: row) or "DimensionMismatch".
void validate_markov(const MarkovMap& kernel, std::size_t dst_size, std::size_t src_size);

/// Exact Wasserstein-1 distance between two states.
Rational w1(const FiniteQCMS& space, const State& mu, const State& nu);
/// Same, with the optimal coupling.
TransportPlan w1_plan(const FiniteQCMS& space, const State& mu, const State& nu);

/// mkD(alpha, beta) = max over destination points x of w1_src(row_x alpha, row_x beta).
Rational mk_dist_maps(const FiniteQCMS& src, const FiniteQCMS& dst, const MarkovMap& alpha, const MarkovMap& beta);

/// dil(alpha) = max over x != y in dst of w1_src(row_x, row_y) / d_dst(x, y).
Rational dil_markov(const FiniteQCMS& src, const FiniteQCMS& dst, const MarkovMap& alpha);
Rational dil_markov(const FiniteQCMS& space, const MarkovMap& alpha);

/// A finite space with a monoid acting by Markov kernels.
struct LipschitzDynamicalSystem {
  FiniteQCMS space;
  FiniteMetricMonoid monoid;
  std::vector<MarkovMap> action;  // indexed by monoid element
  std::vector<Rational> dilations;  // dil(action[g]), filled by validate_system
};

/// Checks kernels are stochastic, action(e) = id and action(gh) = action(g) action(h).
/// Throws DomainError "IdentityNotFixed" (witness e), "ActionNotMorphism"
/// (witness g, h), "NotStochastic" or "DimensionMismatch". Fills the dilation table.
LipschitzDynamicalSystem validate_system(FiniteQCMS space, FiniteMetricMonoid monoid, std::vector<MarkovMap> action);

/// Largest omega among the modulus candidates of the monoid with
///   delta(g, h) < omega  implies  mkD(alpha^g, alpha^h) < eps.
std::optional<Rational> action_modulus(const LipschitzDynamicalSystem& sys, const Rational& eps);

/// First pair (g, h) with delta(g, h) < omega and mkD(alpha^g, alpha^h) >= eps.
std::optional<std::pair<Element, Element>> action_modulus_violation(const LipschitzDynamicalSystem& sys,
                                                                    const Rational& eps, const Rational& omega);

/// Point permutation of a kernel that is a permutation matrix, else nullopt.
std::optional<std::vector<std::size_t>> kernel_permutation(const MarkovMap& kernel);

/// The quotient group G/K with length metric l(g) = mkD(alpha^g, id),
/// K = { g : l(g) = 0 }. Requires a group acting by isometric point
/// permutations; throws DomainError "NotFullIsometry" (witness g) or
/// "NotAGroup" otherwise. The result is validated.
FiniteMetricMonoid induced_length_metric(const LipschitzDynamicalSystem& sys);

}  // namespace covprop
