/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "covprop/almost_iso.hpp"
#include "covprop/qcms.hpp"
#include "covprop/upsilon.hpp"

namespace covprop {

/// A classical covariant tunnel: an ambient finite metric space Z with
/// isometric embeddings of both spaces, and an almost isometric pair
/// between the two monoids.
struct CovariantTunnel {
  FiniteQCMS ambient;
  std::vector<std::size_t> embed1;  // X1 -> Z
  std::vector<std::size_t> embed2;  // X2 -> Z
  AlmostIsoPair pair;
  Rational epsilon;
};

/// Throws DomainError "DimensionMismatch", "NotInjective" (witness j, x),
/// "NotIsometricEmbedding" (witness j, x, y) or "PairNotCertified" (the
/// pair must pass at (epsilon, 1/epsilon)).
void validate_tunnel(const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
                     const CovariantTunnel& tunnel);

/// Per-point interval [lo, hi].
struct TargetSetBox {
  std::vector<Rational> lo;
  std::vector<Rational> hi;
};

/// McShane-Whitney envelope of the l-Lipschitz extensions of a (a function
/// on X1) evaluated on every ambient point. Throws "SeminormExceeded" if l < L(a).
TargetSetBox target_set_ambient(const CovariantTunnel& tunnel, const std::vector<Rational>& a, const Rational& l);
/// The same envelope restricted to the embedded copy of X2.
TargetSetBox target_set(const CovariantTunnel& tunnel, const std::vector<Rational>& a, const Rational& l);

/// max over j and z in Z of the distance from z to the copy of X_j.
Rational extent(const FiniteQCMS& ambient, const std::vector<std::size_t>& embed1,
                const std::vector<std::size_t>& embed2);
Rational extent(const CovariantTunnel& tunnel);

struct ReachReport {
  Rational value;
  int orientation = 1;     // where the maximum is attained
  std::size_t point = 0;   // Dirac state of X_orientation attaining it
  std::uint64_t lps = 0;   // linear programs solved
};

/// epsilon-reach with the outer supremum over Dirac states, each inner
/// inf-sup solved as one exact linear program. Uses tunnel.epsilon.
ReachReport reach_report(const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
                         const CovariantTunnel& tunnel);
Rational reach(const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
               const CovariantTunnel& tunnel);

/// Inner value inf over psi of max over g in the ball of W1(phi K_g, psi K'_{f(g)})
/// for an explicit outer state phi of X_orientation.
Rational reach_at_state(const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
                        const CovariantTunnel& tunnel, int orientation, const State& phi);

/// max(reach, extent).
Rational magnitude(const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
                   const CovariantTunnel& tunnel);

/// An isometric monoid isomorphism together with an isometric point
/// bijection intertwining the actions: K2_{phi(g)}(s x, s y) = K1_g(x, y).
struct EquivariantIsomorphism {
  std::vector<Element> monoid_map;
  std::vector<std::size_t> point_map;
};
std::optional<EquivariantIsomorphism> find_equivariant_isomorphism(const LipschitzDynamicalSystem& sys1,
                                                                   const LipschitzDynamicalSystem& sys2);

/// All isometric bijections X1 -> X2.
std::vector<std::vector<std::size_t>> isometric_bijections(const FiniteQCMS& x1, const FiniteQCMS& x2);

/// Correspondences R between two point sets that are minimal in the sense
/// used here: each x gets one partner, then each uncovered y gets one.
/// Exhaustive up to `exhaustive_limit` points per side, a single greedy
/// correspondence (nearest distance profile) above it.
std::vector<std::vector<std::pair<std::size_t, std::size_t>>> candidate_correspondences(
    const FiniteQCMS& x1, const FiniteQCMS& x2, std::size_t exhaustive_limit);

/// Z = X1 disjoint union X2 with d(x1, x2) = min over (p, q) in R of
/// d1(x1, p) + eta + d2(q, x2). A metric when eta >= dis(R)/2 and eta > 0;
/// throws "NotAMetric" otherwise.
struct BridgeGeometry {
  FiniteQCMS ambient;
  std::vector<std::size_t> embed1;
  std::vector<std::size_t> embed2;
  Rational eta;
};
BridgeGeometry bridge_geometry(const FiniteQCMS& x1, const FiniteQCMS& x2,
                               const std::vector<std::pair<std::size_t, std::size_t>>& relation, const Rational& eta);

struct CovpropOptions {
  std::size_t budget = 12;             // max monoid elements
  std::size_t exhaustive_limit = 4;    // max points for exhaustive correspondences
  std::size_t pair_limit = 32;         // almost-iso pairs tried per probe
  std::optional<std::vector<Rational>> eta_grid;  // default: dis(R)/2 and 1/2^k
  unsigned jobs = 1;
};

struct CovpropResult {
  ExactReal value;  // rational with value^2 < 1/2, or sqrt2/2
  std::optional<CovariantTunnel> witness;
  bool attained = false;  // witness has magnitude <= value at epsilon = value
  bool equivariant_isomorphism = false;
  std::uint64_t geometries = 0;
  std::uint64_t tunnels_evaluated = 0;
  std::uint64_t lps = 0;
  SearchStats search;
};

/// Upper bound on the covariant propinquity from the declared tunnel
/// family (isometric identifications and bridge geometries, paired with
/// almost isometries found by the feasibility search). Exactly 0 iff an
/// equivariant isomorphism exists. Throws "SizeLimitExceeded" above the budget.
CovpropResult covprop_upper_bound(const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
                                  const CovpropOptions& options = {});

/// Upper bound on the distance between the underlying spaces from the same
/// geometries: 0 for isometric spaces, else the least dis(R)/2.
Rational space_propinquity_bound(const FiniteQCMS& x1, const FiniteQCMS& x2, std::size_t exhaustive_limit = 4);

}  // namespace covprop
