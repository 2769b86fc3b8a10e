/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "covprop/almost_iso.hpp"
#include "covprop/qcms.hpp"
#include "covprop/tunnels.hpp"
#include "covprop/upsilon.hpp"

namespace covprop {

/// links[n] connects monoids[n] to monoids[n + 1], certified at
/// (epsilons[n], 1/epsilons[n]).
struct MonoidChain {
  std::vector<FiniteMetricMonoid> monoids;
  std::vector<AlmostIsoPair> links;
  std::vector<Rational> epsilons;
};

/// Throws DomainError "DimensionMismatch", "EpsilonOutOfRange" (witness n;
/// needs 0 < eps and eps^2 <= 1/2) or "LinkNotCertified" (witness n).
void validate_chain(const MonoidChain& chain);

/// sum of epsilons[j] for j in [n, k).
Rational epsilon_sum(const MonoidChain& chain, std::size_t n, std::size_t k);

/// Composite of links n..k-1, certified at (sum, 1/sum). Throws
/// "BudgetExceeded" when sum^2 > 1/2 and "IndexOutOfRange" unless n < k <= last.
AlmostIsoPair compose_chain(const MonoidChain& chain, std::size_t n, std::size_t k);

/// The sequence through the chain end that is the identity before N, g at N,
/// and forward images after. Throws "OutOfBall" unless the norm of g is at
/// most 1/(tail sum of epsilons from N), the truncated tail; at the last
/// index the tail is empty and every g qualifies.
std::vector<Element> lift_element(const MonoidChain& chain, std::size_t N, Element g);

/// One regularity entry: the implication
///   d_n(h, k) < omega  implies  d_n(h g_n, k g_n) < epsilon
/// holds for every n in [start, verified_through].
struct RegularityEntry {
  Rational epsilon;
  Rational omega;
  std::size_t start = 0;
  std::size_t verified_through = 0;
};

/// Per-start search for an explicit sequence; best is the largest omega,
/// ties to the earliest start.
struct RegularityCertificate {
  std::vector<Element> sequence;
  std::vector<std::optional<RegularityEntry>> per_start;
  std::optional<RegularityEntry> best;
};

RegularityCertificate check_regular_sequence(const MonoidChain& chain, const std::vector<Element>& sequence,
                                             const Rational& epsilon);
/// check_regular_sequence on lift_element(chain, N, g).
RegularityCertificate check_regular(const MonoidChain& chain, std::size_t N, Element g, const Rational& epsilon);

struct CauchyBound {
  ExactReal value;  // min(sqrt2/2, sum)
  Rational epsilon_sum;
  std::optional<AlmostIsoPair> witness;  // composite, when the sum is in budget
};

CauchyBound cauchy_bound(const MonoidChain& chain, std::size_t n, std::size_t m);

/// Step function: D(t) = value of the first step whose bound is >= t; the
/// last value beyond the final bound.
struct DilationProfile {
  std::vector<std::pair<Rational, Rational>> steps;  // (bound, value), bounds ascending
  Rational operator()(const Rational& t) const;
};

/// For every n >= from: d_n(g, h) < omega implies mkD(alpha_n^g, alpha_n^h) < epsilon.
struct ModulusEntry {
  Rational epsilon;
  Rational omega;
  std::size_t from = 0;
};

class HypothesisFailed : public DomainError {
 public:
  HypothesisFailed(int hypothesis, const std::string& message, std::vector<std::size_t> witness);
  int hypothesis() const { return hypothesis_; }

 private:
  int hypothesis_;
};

struct LimitExperimentOptions {
  Rational tolerance{1, 4};
  std::size_t budget = 16;
  CovpropOptions covprop;
};

struct LimitReport {
  std::size_t proxy = 0;
  /// Hypothesis (2): exact distance of each monoid to the proxy monoid.
  std::vector<ExactReal> upsilon_to_proxy;
  /// Hypothesis (3): space distance bound of each space to the proxy space.
  std::vector<Rational> space_to_proxy;
  /// Hypothesis (4): omega from action_modulus per (schedule entry, system).
  std::vector<std::vector<std::optional<Rational>>> moduli;
  std::vector<Rational> max_dilation;
  std::vector<CovpropResult> bounds;
  bool chain_verified = false;
  bool non_increasing = true;
  bool below_tolerance = false;
  /// Cauchy bounds against the proxy when a chain is supplied.
  std::vector<CauchyBound> cauchy;
};

/// Checks hypotheses (1)-(4) on the finite family, throwing HypothesisFailed
/// on the first failure, then reports covariant propinquity bounds of every
/// system against the last one (the proxy for the limit).
LimitReport limit_experiment(const std::vector<LipschitzDynamicalSystem>& systems,
                             const std::optional<MonoidChain>& chain, const DilationProfile& profile,
                             const std::vector<ModulusEntry>& schedule, const LimitExperimentOptions& options = {});

}  // namespace covprop
