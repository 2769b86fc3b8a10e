/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "covprop/almost_iso.hpp"

#include <algorithm>

namespace covprop {
namespace {

struct Side {
  const FiniteMetricMonoid& from;
  const FiniteMetricMonoid& to;
  const std::vector<Element>& there;  // from -> to
  const std::vector<Element>& back;   // to -> from
  int orientation;
};

void check_map_sizes(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, const std::vector<Element>& forward,
                     const std::vector<Element>& backward) {
  auto valid = [](const std::vector<Element>& map, std::size_t dom, std::size_t cod) {
    return map.size() == dom && std::all_of(map.begin(), map.end(), [cod](Element x) { return x < cod; });
  };
  if (!valid(forward, g1.size(), g2.size()) || !valid(backward, g2.size(), g1.size())) {
    throw ParseError("almost-isometry maps do not match the monoid sizes", "forward/backward");
  }
}

// Max over g, g' in from[r], h in to[r] of the distortion; stops early
// and records a witness once the distortion exceeds `limit` (if given).
Rational scan_side(const Side& s, const Rational& radius, const Rational* limit,
                   std::optional<AlmostIsoViolation>& witness) {
  const auto ball_j = identity_ball(s.from, radius);
  const auto ball_k = identity_ball(s.to, radius);
  Rational worst = 0;
  for (Element gp : ball_j) {
    for (Element g : ball_j) {
      const Element image = s.to.mul(s.there[g], s.there[gp]);
      const Element product = s.from.mul(g, gp);
      for (Element h : ball_k) {
        Rational gap = abs(s.to.dist(image, h) - s.from.dist(product, s.back[h]));
        if (limit && gap > *limit) {
          witness = AlmostIsoViolation{s.orientation, g, gp, h, false};
          return gap;
        }
        if (gap > worst) worst = gap;
      }
    }
  }
  return worst;
}

}  // namespace

AlmostIsoPair identity_pair(const FiniteMetricMonoid& g, const Rational& epsilon, const Rational& radius) {
  std::vector<Element> id(g.size());
  for (Element i = 0; i < g.size(); ++i) id[i] = i;
  return AlmostIsoPair{id, id, epsilon, radius};
}

AlmostIsoCheck check_almost_iso(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                                const std::vector<Element>& forward, const std::vector<Element>& backward,
                                const Rational& epsilon, const Rational& radius) {
  check_map_sizes(g1, g2, forward, backward);
  AlmostIsoCheck result;
  if (forward[g1.identity()] != g2.identity()) {
    result.ok = false;
    result.witness = AlmostIsoViolation{1, g1.identity(), 0, 0, true};
    return result;
  }
  if (backward[g2.identity()] != g1.identity()) {
    result.ok = false;
    result.witness = AlmostIsoViolation{2, g2.identity(), 0, 0, true};
    return result;
  }
  for (const Side& side : {Side{g1, g2, forward, backward, 1}, Side{g2, g1, backward, forward, 2}}) {
    scan_side(side, radius, &epsilon, result.witness);
    if (result.witness) {
      result.ok = false;
      return result;
    }
  }
  return result;
}

AlmostIsoCheck check_almost_iso(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                                const AlmostIsoPair& pair) {
  return check_almost_iso(g1, g2, pair.forward, pair.backward, pair.epsilon, pair.radius);
}

std::optional<Rational> least_tolerance(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                                        const std::vector<Element>& forward,
                                        const std::vector<Element>& backward, const Rational& radius) {
  check_map_sizes(g1, g2, forward, backward);
  if (forward[g1.identity()] != g2.identity() || backward[g2.identity()] != g1.identity()) return std::nullopt;
  std::optional<AlmostIsoViolation> unused;
  Rational a = scan_side(Side{g1, g2, forward, backward, 1}, radius, nullptr, unused);
  Rational b = scan_side(Side{g2, g1, backward, forward, 2}, radius, nullptr, unused);
  return std::max(a, b);
}

bool within_composition_range(const Rational& epsilon) {
  return epsilon > 0 && epsilon * epsilon <= Rational(1, 2);
}

AlmostIsoPair compose(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, const FiniteMetricMonoid& g3,
                      const AlmostIsoPair& first, const AlmostIsoPair& second) {
  for (const auto* p : {&first, &second}) {
    if (!within_composition_range(p->epsilon)) {
      throw DomainError("PreconditionFailed", "epsilon " + to_string(p->epsilon) + " is outside (0, sqrt2/2]");
    }
  }
  if (!check_almost_iso(g1, g2, first.forward, first.backward, first.epsilon, 1 / first.epsilon)) {
    throw DomainError("PreconditionFailed", "first pair is not a (1/eps)-local eps-almost isometry");
  }
  if (!check_almost_iso(g2, g3, second.forward, second.backward, second.epsilon, 1 / second.epsilon)) {
    throw DomainError("PreconditionFailed", "second pair is not a (1/eps)-local eps-almost isometry");
  }

  AlmostIsoPair out;
  out.forward.resize(g1.size());
  for (Element g = 0; g < g1.size(); ++g) out.forward[g] = second.forward[first.forward[g]];
  out.backward.resize(g3.size());
  for (Element h = 0; h < g3.size(); ++h) out.backward[h] = first.backward[second.backward[h]];
  out.epsilon = first.epsilon + second.epsilon;
  out.radius = 1 / out.epsilon;

  if (!check_almost_iso(g1, g3, out)) {
    throw DomainError("CompositionNotCertified", "composite failed re-verification");
  }
  return out;
}

bool DerivedPropertiesReport::all_hold() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const auto& a) { return a.holds; });
}

DerivedPropertiesReport derived_properties(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                                           const AlmostIsoPair& pair) {
  check_map_sizes(g1, g2, pair.forward, pair.backward);
  DerivedPropertiesReport report;
  const Rational& eps = pair.epsilon;
  const Rational& r = pair.radius;
  const Rational r_prime = std::max(Rational(0), Rational(r - eps));

  auto record = [&](std::size_t index, int orientation, std::vector<Element> witness) {
    auto& a = report.assertions[index];
    if (!a.holds) return;
    a.holds = false;
    a.orientation = orientation;
    a.witness = std::move(witness);
  };

  for (const Side& s : {Side{g1, g2, pair.forward, pair.backward, 1}, Side{g2, g1, pair.backward, pair.forward, 2}}) {
    const auto ball_j = identity_ball(s.from, r);
    const auto ball_k = identity_ball(s.to, r);
    const auto ball_jp = identity_ball(s.from, r_prime);
    const auto ball_jp2 = identity_ball(s.from, r_prime / 2);
    const Element e_k = s.to.identity();

    for (Element g : ball_j) {
      for (Element h : ball_k) {
        if (abs(s.to.dist(s.there[g], h) - s.from.dist(g, s.back[h])) > eps) record(0, s.orientation, {g, h});
      }
      // For t in [delta(e, g), r] the tightest instance is t = delta(e, g).
      if (s.to.dist(e_k, s.there[g]) > s.from.norm(g) + eps) record(1, s.orientation, {g});
    }
    for (Element g : ball_jp) {
      if (s.from.dist(s.back[s.there[g]], g) > eps) record(2, s.orientation, {g});
      for (Element gp : ball_jp) {
        if (abs(s.to.dist(s.there[g], s.there[gp]) - s.from.dist(g, gp)) > 2 * eps) {
          record(4, s.orientation, {g, gp});
        }
      }
    }
    for (Element g : ball_jp2) {
      for (Element gp : ball_jp2) {
        const Element lhs = s.to.mul(s.there[g], s.there[gp]);
        if (s.to.dist(lhs, s.there[s.from.mul(g, gp)]) > 2 * eps) record(3, s.orientation, {g, gp});
      }
    }
  }
  return report;
}

InverseEstimateCheck check_inverse_estimate(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                                            const AlmostIsoPair& pair) {
  if (!g1.is_group() || !g2.is_group()) throw DomainError("NotAGroup", "inverse estimate needs two groups");
  const Rational radius = 1 / pair.epsilon;
  for (const Side& s : {Side{g1, g2, pair.forward, pair.backward, 1}, Side{g2, g1, pair.backward, pair.forward, 2}}) {
    for (Element g : identity_ball(s.from, radius)) {
      const Element gi = s.from.inverse(g);
      if (s.from.norm(gi) > radius) continue;
      if (s.to.dist(s.to.inverse(s.there[g]), s.there[gi]) > pair.epsilon) {
        return InverseEstimateCheck{false, s.orientation, g};
      }
    }
  }
  return {};
}

}  // namespace covprop
