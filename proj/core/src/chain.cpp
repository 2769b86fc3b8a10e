/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "covprop/chain.hpp"

#include <algorithm>

#include "covprop/errors.hpp"

namespace covprop {

void validate_chain(const MonoidChain& chain) {
  if (chain.monoids.empty()) throw DomainError("DimensionMismatch", "a chain needs at least one monoid");
  if (chain.links.size() + 1 != chain.monoids.size() || chain.epsilons.size() != chain.links.size()) {
    throw DomainError("DimensionMismatch", "a chain of n monoids needs n - 1 links and epsilons");
  }
  for (std::size_t n = 0; n < chain.links.size(); ++n) {
    const Rational& eps = chain.epsilons[n];
    if (!within_composition_range(eps)) {
      throw DomainError("EpsilonOutOfRange", "link epsilon must satisfy 0 < eps, eps^2 <= 1/2", {n});
    }
    const auto& a = chain.monoids[n];
    const auto& b = chain.monoids[n + 1];
    const auto& link = chain.links[n];
    if (link.forward.size() != a.size() || link.backward.size() != b.size()) {
      throw DomainError("DimensionMismatch", "link maps do not match the monoids", {n});
    }
    if (!check_almost_iso(a, b, link.forward, link.backward, eps, 1 / eps).ok) {
      throw DomainError("LinkNotCertified", "link fails at (eps, 1/eps)", {n});
    }
  }
}

Rational epsilon_sum(const MonoidChain& chain, std::size_t n, std::size_t k) {
  Rational s = 0;
  for (std::size_t j = n; j < k && j < chain.epsilons.size(); ++j) s += chain.epsilons[j];
  return s;
}

AlmostIsoPair compose_chain(const MonoidChain& chain, std::size_t n, std::size_t k) {
  if (!(n < k) || k >= chain.monoids.size()) {
    throw DomainError("IndexOutOfRange", "compose_chain needs n < k within the chain", {n, k});
  }
  const Rational total = epsilon_sum(chain, n, k);
  if (total * total > Rational(1, 2)) {
    throw DomainError("BudgetExceeded", "epsilon sum " + to_string(total) + " is above sqrt2/2", {n, k});
  }
  AlmostIsoPair acc = chain.links[n];
  acc.epsilon = chain.epsilons[n];
  acc.radius = 1 / acc.epsilon;
  for (std::size_t j = n + 1; j < k; ++j) {
    AlmostIsoPair next = chain.links[j];
    next.epsilon = chain.epsilons[j];
    next.radius = 1 / next.epsilon;
    acc = compose(chain.monoids[n], chain.monoids[j], chain.monoids[j + 1], acc, next);
  }
  if (!check_almost_iso(chain.monoids[n], chain.monoids[k], acc).ok) {
    throw DomainError("CompositionNotCertified", "composite fails re-verification", {n, k});
  }
  return acc;
}

std::vector<Element> lift_element(const MonoidChain& chain, std::size_t N, Element g) {
  const std::size_t len = chain.monoids.size();
  if (N >= len) throw DomainError("IndexOutOfRange", "start index beyond the chain", {N});
  if (g >= chain.monoids[N].size()) throw DomainError("IndexOutOfRange", "element not in the monoid", {N, g});
  const Rational tail = epsilon_sum(chain, N, len - 1);
  if (tail > 0 && chain.monoids[N].norm(g) * tail > 1) {
    throw DomainError("OutOfBall", "element lies outside the ball of radius 1/" + to_string(tail), {N, g});
  }
  std::vector<Element> seq(len);
  for (std::size_t n = 0; n < N; ++n) seq[n] = chain.monoids[n].identity();
  seq[N] = g;
  for (std::size_t n = N + 1; n < len; ++n) seq[n] = chain.links[n - 1].forward[seq[n - 1]];
  return seq;
}

RegularityCertificate check_regular_sequence(const MonoidChain& chain, const std::vector<Element>& sequence,
                                             const Rational& epsilon) {
  const std::size_t len = chain.monoids.size();
  if (sequence.size() != len) throw DomainError("DimensionMismatch", "sequence length differs from the chain");
  RegularityCertificate cert;
  cert.sequence = sequence;
  for (std::size_t m = 0; m < len; ++m) {
    std::vector<Rational> candidates;
    Rational diam = 0;
    for (std::size_t n = m; n < len; ++n) {
      const auto& d = chain.monoids[n].realized_distances();
      candidates.insert(candidates.end(), d.begin() + 1, d.end());
      diam = std::max<Rational>(diam, chain.monoids[n].diameter());
    }
    candidates.push_back(diam + 1);
    const auto omega = largest_satisfying(candidates, [&](const Rational& w) {
      for (std::size_t n = m; n < len; ++n) {
        const auto& G = chain.monoids[n];
        const Element g = sequence[n];
        for (Element h = 0; h < G.size(); ++h)
          for (Element k = 0; k < G.size(); ++k)
            if (G.dist(h, k) < w && !(G.dist(G.mul(h, g), G.mul(k, g)) < epsilon)) return false;
      }
      return true;
    });
    if (omega) {
      RegularityEntry entry{epsilon, *omega, m, len - 1};
      cert.per_start.push_back(entry);
      if (!cert.best || entry.omega > cert.best->omega) cert.best = entry;
    } else {
      cert.per_start.push_back(std::nullopt);
    }
  }
  return cert;
}

RegularityCertificate check_regular(const MonoidChain& chain, std::size_t N, Element g, const Rational& epsilon) {
  return check_regular_sequence(chain, lift_element(chain, N, g), epsilon);
}

CauchyBound cauchy_bound(const MonoidChain& chain, std::size_t n, std::size_t m) {
  if (!(n < m) || m >= chain.monoids.size()) {
    throw DomainError("IndexOutOfRange", "cauchy_bound needs n < m within the chain", {n, m});
  }
  CauchyBound out;
  out.epsilon_sum = epsilon_sum(chain, n, m);
  out.value = ExactReal::capped(out.epsilon_sum);
  if (out.epsilon_sum * out.epsilon_sum <= Rational(1, 2)) out.witness = compose_chain(chain, n, m);
  return out;
}

Rational DilationProfile::operator()(const Rational& t) const {
  if (steps.empty()) throw DomainError("InvalidProfile", "dilation profile has no steps");
  for (const auto& [bound, value] : steps)
    if (t <= bound) return value;
  return steps.back().second;
}

HypothesisFailed::HypothesisFailed(int hypothesis, const std::string& message, std::vector<std::size_t> witness)
    : DomainError("HypothesisFailed", "hypothesis (" + std::to_string(hypothesis) + "): " + message,
                  std::move(witness)),
      hypothesis_(hypothesis) {}

LimitReport limit_experiment(const std::vector<LipschitzDynamicalSystem>& systems,
                             const std::optional<MonoidChain>& chain, const DilationProfile& profile,
                             const std::vector<ModulusEntry>& schedule, const LimitExperimentOptions& options) {
  if (systems.empty()) throw DomainError("DimensionMismatch", "experiment needs at least one system");
  const std::size_t len = systems.size();
  LimitReport report;
  report.proxy = len - 1;
  const auto& proxy = systems.back();

  if (chain) {
    validate_chain(*chain);
    if (chain->monoids.size() != len) throw DomainError("DimensionMismatch", "chain and systems differ in length");
    for (std::size_t n = 0; n < len; ++n) {
      if (chain->monoids[n].size() != systems[n].monoid.size()) {
        throw DomainError("DimensionMismatch", "chain monoid differs from the system monoid", {n});
      }
    }
    report.chain_verified = true;
    for (std::size_t n = 0; n + 1 < len; ++n) report.cauchy.push_back(cauchy_bound(*chain, n, len - 1));
  }

  // (1) dil(alpha_n^g) <= D(norm g).
  for (std::size_t n = 0; n < len; ++n) {
    const auto& s = systems[n];
    Rational worst = 0;
    for (Element g = 0; g < s.monoid.size(); ++g) {
      worst = std::max<Rational>(worst, s.dilations[g]);
      if (s.dilations[g] > profile(s.monoid.norm(g))) {
        throw HypothesisFailed(1, "dilation " + to_string(s.dilations[g]) + " exceeds the profile", {n, g});
      }
    }
    report.max_dilation.push_back(worst);
  }

  // (2) monoid distance to the proxy decreases to 0.
  UpsilonOptions uopt;
  uopt.budget = options.budget;
  uopt.jobs = options.covprop.jobs;
  for (std::size_t n = 0; n < len; ++n) {
    report.upsilon_to_proxy.push_back(upsilon(systems[n].monoid, proxy.monoid, uopt).value);
    if (n > 0 && report.upsilon_to_proxy[n] > report.upsilon_to_proxy[n - 1]) {
      throw HypothesisFailed(2, "monoid distance to the proxy increases at index " + std::to_string(n), {n});
    }
  }
  if (report.upsilon_to_proxy.back().sign() != 0) throw HypothesisFailed(2, "final monoid distance is not 0", {len - 1});

  // (3) space distance to the proxy decreases to 0.
  for (std::size_t n = 0; n < len; ++n) {
    report.space_to_proxy.push_back(
        space_propinquity_bound(systems[n].space, proxy.space, options.covprop.exhaustive_limit));
    if (n > 0 && report.space_to_proxy[n] > report.space_to_proxy[n - 1]) {
      throw HypothesisFailed(3, "space distance to the proxy increases at index " + std::to_string(n), {n});
    }
  }
  if (report.space_to_proxy.back() != 0) throw HypothesisFailed(3, "final space distance is not 0", {len - 1});

  // (4) uniform modulus of the action at every scheduled (eps, omega, from).
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& entry = schedule[i];
    std::vector<std::optional<Rational>> row;
    for (std::size_t n = 0; n < len; ++n) {
      row.push_back(action_modulus(systems[n], entry.epsilon));
      if (n < entry.from) continue;
      if (const auto bad = action_modulus_violation(systems[n], entry.epsilon, entry.omega)) {
        throw HypothesisFailed(4,
                               "schedule entry " + std::to_string(i) + ": mkD >= " + to_string(entry.epsilon) +
                                   " at monoid distance below " + to_string(entry.omega),
                               {n, bad->first, bad->second});
      }
    }
    report.moduli.push_back(std::move(row));
  }

  CovpropOptions copt = options.covprop;
  copt.budget = options.budget;
  for (std::size_t n = 0; n < len; ++n) {
    report.bounds.push_back(covprop_upper_bound(systems[n], proxy, copt));
    if (n > 0 && report.bounds[n].value > report.bounds[n - 1].value) report.non_increasing = false;
  }
  report.below_tolerance = report.bounds.back().value < ExactReal(options.tolerance);
  return report;
}

}  // namespace covprop
