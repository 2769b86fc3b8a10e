/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "covprop/almost_iso.hpp"
#include "covprop/monoid.hpp"

namespace covprop {

struct SearchStats {
  std::uint64_t nodes = 0;   // partial assignments extended
  std::uint64_t probes = 0;  // feasibility problems solved

  SearchStats& operator+=(const SearchStats& o) {
    nodes += o.nodes;
    probes += o.probes;
    return *this;
  }
};

/// Backtracking search for (radius)-local (epsilon)-almost isometric
/// isomorphisms between two finite monoids.
///
/// Variables are the images of the non-identity ball elements of both
/// monoids, assigned in increasing distance from the identity. Each value
/// domain is pre-filtered by the necessary condition
///   delta_k(e_k, f_j(g)) <= delta_j(e_j, g) + epsilon,
/// and every instance of the defining inequality is tested as soon as its
/// last variable is assigned. With `star` set, the extra right-translation
/// dilation constraints of the starred distance are imposed on every element.
class AlmostIsoSearch {
 public:
  AlmostIsoSearch(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, Rational epsilon, Rational radius,
                  bool star = false);
  ~AlmostIsoSearch();
  AlmostIsoSearch(AlmostIsoSearch&&) noexcept;
  AlmostIsoSearch& operator=(AlmostIsoSearch&&) noexcept;

  /// First solution in search order, or nullopt when infeasible.
  std::optional<AlmostIsoPair> first();
  /// Up to `limit` distinct solutions (distinct on the balls), in search order.
  std::vector<AlmostIsoPair> enumerate(std::size_t limit);

  const SearchStats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Every epsilon at which feasibility can change: differences of realized
/// distances, reciprocals of positive distances, the distances themselves,
/// and for the starred variant differences of right-translation dilations.
/// Sorted, includes 0.
std::vector<Rational> critical_epsilons(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                                        bool star = false);

/// A feasibility probe. Feasibility is constant on each open interval
/// between consecutive criticals and upward closed, so probing every
/// critical and one point inside each interval decides the infimum exactly.
struct EpsilonProbe {
  Rational epsilon;
  Rational left_critical;  // value reported if this probe is the first feasible one
  bool at_critical;
};

/// Probes for every critical c with c^2 < 1/2 and the midpoint right of it.
std::vector<EpsilonProbe> epsilon_probes(const std::vector<Rational>& criticals);

struct UpsilonOptions {
  std::size_t budget = 12;     // max elements per monoid
  bool verify_monotone = true;  // probe every candidate and check upward closure
  unsigned jobs = 1;
};

struct UpsilonResult {
  /// A rational with value^2 < 1/2, or exactly sqrt(2)/2.
  ExactReal value;
  /// Pair certified at (witness->epsilon, witness->radius). When the
  /// infimum is attained this is (value, 1/value); when it is only
  /// approached, the witness sits at the probe inside the open interval
  /// right of `value`. For value 0 the witness is an isometric isomorphism
  /// certified at epsilon 0 on the whole monoids.
  std::optional<AlmostIsoPair> witness;
  bool attained = false;
  bool isometric_isomorphism = false;
  /// Probe points in increasing order (criticals and interval midpoints).
  std::vector<Rational> criticals_tested;
  /// Feasibility outcome for each probe, aligned with criticals_tested.
  std::vector<bool> feasible;
  SearchStats stats;
};

/// Exact monoid Gromov-Hausdorff distance. Throws DomainError
/// "SizeLimitExceeded" above the budget.
UpsilonResult upsilon(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, const UpsilonOptions& options = {});

/// Starred variant: additionally requires, for every g in G1,
///   |dil(h -> h g on G1) - dil(h -> h f(g) on G2)| < epsilon,
/// and symmetrically for the backward map.
UpsilonResult upsilon_star(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                           const UpsilonOptions& options = {});

/// Half the least distortion of a correspondence between G1 and G2 that
/// contains (e1, e2). Exhaustive; throws "SizeLimitExceeded" above
/// `size_limit` elements per monoid.
Rational gh_pointed(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, std::size_t size_limit = 7);

/// Scale-limited pointed variant on the same capped scale as upsilon: the
/// infimum of eps for which the closed balls of radius 1/eps about the
/// identities admit such a correspondence with distortion <= 2 eps, capped
/// at sqrt2/2.
ExactReal gh_pointed_local(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, std::size_t size_limit = 7);

/// Distortion of an explicit correspondence (list of (x, y) pairs).
Rational correspondence_distortion(const std::vector<std::vector<Rational>>& d1,
                                   const std::vector<std::vector<Rational>>& d2,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& relation);

}  // namespace covprop
