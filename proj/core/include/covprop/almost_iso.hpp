/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "covprop/monoid.hpp"

namespace covprop {

/// A candidate r-local eps-almost isometric isomorphism between G1 and G2.
///
/// Both maps are total; only their restrictions to the radius balls are
/// constrained, so values outside the balls are arbitrary extensions.
struct AlmostIsoPair {
  std::vector<Element> forward;   // G1 -> G2
  std::vector<Element> backward;  // G2 -> G1
  Rational epsilon;
  Rational radius;

  friend bool operator==(const AlmostIsoPair&, const AlmostIsoPair&) = default;
};

/// The identity pair on G (both maps the identity map).
AlmostIsoPair identity_pair(const FiniteMetricMonoid& g, const Rational& epsilon, const Rational& radius);

/// A violated instance of the defining inequality. `orientation` is 1 when
/// (g, g2) range over G1 and h over G2, and 2 for the mirrored condition.
/// For identity failures `identity_failure` is set and g/g2/h are unused.
struct AlmostIsoViolation {
  int orientation = 1;
  Element g = 0;
  Element g2 = 0;
  Element h = 0;
  bool identity_failure = false;
};

struct AlmostIsoCheck {
  bool ok = true;
  std::optional<AlmostIsoViolation> witness;
  explicit operator bool() const { return ok; }
};

/// Exhaustive check of the defining inequality on G_j[radius] x G_j[radius] x G_k[radius],
/// for both orientations, plus identity preservation.
AlmostIsoCheck check_almost_iso(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                                const std::vector<Element>& forward, const std::vector<Element>& backward,
                                const Rational& epsilon, const Rational& radius);

/// Checks a pair at its own (epsilon, radius).
AlmostIsoCheck check_almost_iso(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                                const AlmostIsoPair& pair);

/// The least tolerance at which the maps pass at `radius`: the maximum
/// distortion over all constrained triples. nullopt if identities are not
/// preserved.
std::optional<Rational> least_tolerance(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                                        const std::vector<Element>& forward,
                                        const std::vector<Element>& backward, const Rational& radius);

/// true iff epsilon is in (0, sqrt(2)/2], decided as epsilon^2 <= 1/2.
bool within_composition_range(const Rational& epsilon);

/// Composes a pair G1 <-> G2 certified at (e1, 1/e1) with a pair G2 <-> G3
/// certified at (e2, 1/e2) into (f2 o f1, b1 o b2) at (e1 + e2, 1/(e1 + e2)).
/// Both inputs are re-verified and so is the output. Throws DomainError
/// "PreconditionFailed" for an input outside (0, sqrt(2)/2] or failing
/// verification, and "CompositionNotCertified" if the output fails (which
/// would contradict the composition lemma).
AlmostIsoPair compose(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, const FiniteMetricMonoid& g3,
                      const AlmostIsoPair& first, const AlmostIsoPair& second);

/// One assertion of the derived-property lemma, for one orientation.
struct DerivedPropertyResult {
  bool holds = true;
  int orientation = 0;  // orientation of the first failure
  std::vector<Element> witness;
};

/// Results of assertions (1)-(5), both orientations, checked exhaustively:
///  (1) |d_k(f_j g, h) - d_j(g, f_k h)| <= eps           on G_j[r] x G_k[r]
///  (2) f_j(G_j[t]) within G_k[t + eps] for t in [0, r]
///  (3) d_j(f_k f_j g, g) <= eps                        on G_j[r']
///  (4) d_k(f_j g f_j g', f_j(g g')) <= 2 eps           on G_j[r'/2]
///  (5) |d_k(f_j g, f_j g') - d_j(g, g')| <= 2 eps       on G_j[r']
/// where r' = max(0, r - eps).
struct DerivedPropertiesReport {
  std::array<DerivedPropertyResult, 5> assertions;
  bool all_hold() const;
};

DerivedPropertiesReport derived_properties(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                                           const AlmostIsoPair& pair);

/// Inverse estimate for groups: for a pair certified at (eps, 1/eps), every
/// g with g and g^-1 in G[1/eps] satisfies d_H(f(g)^-1, f(g^-1)) <= eps.
/// Checked for both maps. Returns the first violating (orientation, g) if any.
struct InverseEstimateCheck {
  bool ok = true;
  int orientation = 0;
  Element g = 0;
  explicit operator bool() const { return ok; }
};

InverseEstimateCheck check_inverse_estimate(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                                            const AlmostIsoPair& pair);

}  // namespace covprop
