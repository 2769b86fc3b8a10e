/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "covprop/errors.hpp"
#include "covprop/rational.hpp"

namespace covprop {

using Element = std::size_t;

/// Unvalidated monoid data as read from an instance file.
struct MonoidTable {
  std::vector<std::string> elements;
  Element identity = 0;
  std::vector<std::vector<Element>> mult;
  std::vector<std::vector<Rational>> dist;
  std::optional<std::vector<Element>> inverse;
};

/// Axiom failures reported by validate_monoid, in the order they are checked.
enum class MonoidAxiom {
  IdentityNotUnit,         // witness (g)
  NotAssociative,          // witness (a, b, c)
  NegativeDistance,        // witness (g, h)
  NonZeroDiagonal,         // witness (g)
  NotSeparated,            // witness (g, h): distinct elements at distance 0
  LeftInvarianceViolated,  // witness (g, h, k)
  NotSymmetric,            // witness (g, h)
  TriangleViolated,        // witness (g, h, k): d(g,k) > d(g,h) + d(h,k)
  InverseInvalid,          // witness (g)
};

const char* axiom_name(MonoidAxiom axiom);

class MonoidAxiomError : public DomainError {
 public:
  MonoidAxiomError(MonoidAxiom axiom, std::vector<Element> witness);
  MonoidAxiom axiom() const { return axiom_; }

 private:
  MonoidAxiom axiom_;
};

/// A finite monoid with a left-invariant rational metric: (G, delta, e).
///
/// Instances normally come from validate_monoid(). `unchecked` skips the
/// axiom checks and exists for tables that are deliberately not metric
/// monoids (diagnostics, counterexamples); shape checks still apply.
class FiniteMetricMonoid {
 public:
  static FiniteMetricMonoid unchecked(MonoidTable table);

  std::size_t size() const { return n_; }
  Element identity() const { return identity_; }
  Element mul(Element a, Element b) const { return mult_[a * n_ + b]; }
  const Rational& dist(Element a, Element b) const { return dist_[a * n_ + b]; }
  /// delta(e, g).
  const Rational& norm(Element g) const { return dist(identity_, g); }

  bool is_group() const { return inverse_.has_value(); }
  Element inverse(Element g) const;

  const std::string& name(Element g) const { return names_[g]; }
  const std::vector<std::string>& names() const { return names_; }
  /// Throws ParseError if absent.
  Element index_of(const std::string& name) const;

  /// Distinct distance values, sorted; includes 0.
  const std::vector<Rational>& realized_distances() const { return realized_; }
  Rational diameter() const { return realized_.back(); }
  /// Smallest positive distance, or nullopt for the trivial monoid.
  std::optional<Rational> min_positive_distance() const;

  MonoidTable table() const;

 private:
  FiniteMetricMonoid() = default;
  friend FiniteMetricMonoid validate_monoid(MonoidTable raw);

  std::size_t n_ = 0;
  Element identity_ = 0;
  std::vector<std::string> names_;
  std::vector<Element> mult_;
  std::vector<Rational> dist_;
  std::optional<std::vector<Element>> inverse_;
  std::vector<Rational> realized_;
};

/// Returns the validated monoid iff every axiom holds; otherwise throws
/// MonoidAxiomError for the first failure, with a witness. Shape problems
/// (non-square tables, out-of-range indices) throw ParseError. A missing
/// inverse table is filled in when every element is invertible.
FiniteMetricMonoid validate_monoid(MonoidTable raw);

struct Ball {
  Element center = 0;
  Rational radius;
  std::vector<Element> members;  // sorted
};

/// Closed ball { h : dist(center, h) <= radius }.
Ball ball(const FiniteMetricMonoid& g, Element center, const Rational& radius);
/// G[r], the ball around the identity.
std::vector<Element> identity_ball(const FiniteMetricMonoid& g, const Rational& radius);

/// Best Lipschitz constant of h -> h*g. 1 on a one-element monoid, where the map is the identity.
Rational right_translation_dilation(const FiniteMetricMonoid& g, Element right);

/// Largest candidate in `candidates` for which pred(candidate) holds, where
/// pred is monotone (true below a threshold). Candidates need not be sorted.
template <class Pred>
std::optional<Rational> largest_satisfying(std::vector<Rational> candidates, Pred pred) {
  candidates = sorted_unique(std::move(candidates));
  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
    if (pred(*it)) return *it;
  }
  return std::nullopt;
}

/// Candidate moduli: the positive realized distances and diameter + 1.
std::vector<Rational> modulus_candidates(const FiniteMetricMonoid& g);

/// Largest omega among modulus_candidates such that
///   dist(g, h) < omega  implies  dist(g^-1, h^-1) < eps.
/// Throws DomainError "NotAGroup" when no inverse table is present.
std::optional<Rational> inverse_modulus(const FiniteMetricMonoid& g, const Rational& eps);

/// A bijection phi: G1 -> G2 with phi(e1) = e2, phi(ab) = phi(a)phi(b) and
/// dist2(phi a, phi b) = dist1(a, b), found by exhaustive search; nullopt if none.
std::optional<std::vector<Element>> find_isometric_isomorphism(const FiniteMetricMonoid& g1,
                                                                const FiniteMetricMonoid& g2);

}  // namespace covprop
