/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "covprop/monoid.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace covprop {

const char* axiom_name(MonoidAxiom axiom) {
  switch (axiom) {
    case MonoidAxiom::IdentityNotUnit: return "IdentityNotUnit";
    case MonoidAxiom::NotAssociative: return "NotAssociative";
    case MonoidAxiom::NegativeDistance: return "NegativeDistance";
    case MonoidAxiom::NonZeroDiagonal: return "NonZeroDiagonal";
    case MonoidAxiom::NotSeparated: return "NotSeparated";
    case MonoidAxiom::LeftInvarianceViolated: return "LeftInvarianceViolated";
    case MonoidAxiom::NotSymmetric: return "NotSymmetric";
    case MonoidAxiom::TriangleViolated: return "TriangleViolated";
    case MonoidAxiom::InverseInvalid: return "InverseInvalid";
  }
  return "UnknownAxiom";
}

namespace {

std::string witness_text(const std::vector<Element>& w) {
  std::string s = "witness (";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s + ")";
}

void check_shape(const MonoidTable& t) {
  const std::size_t n = t.elements.size();
  if (n == 0) throw ParseError("monoid has no elements", "elements");
  if (t.identity >= n) throw ParseError("identity index out of range", "identity");
  if (t.mult.size() != n) throw ParseError("mult must have one row per element", "mult");
  for (const auto& row : t.mult) {
    if (row.size() != n) throw ParseError("mult must be square", "mult");
    for (Element x : row) {
      if (x >= n) throw ParseError("mult entry out of range", "mult");
    }
  }
  if (t.dist.size() != n) throw ParseError("dist must have one row per element", "dist");
  for (const auto& row : t.dist) {
    if (row.size() != n) throw ParseError("dist must be square", "dist");
  }
  if (t.inverse) {
    if (t.inverse->size() != n) throw ParseError("inverse must have one entry per element", "inverse");
    for (Element x : *t.inverse) {
      if (x >= n) throw ParseError("inverse entry out of range", "inverse");
    }
  }
}

void fail(MonoidAxiom axiom, std::vector<Element> witness) { throw MonoidAxiomError(axiom, std::move(witness)); }

void check_axioms(const MonoidTable& t) {
  const std::size_t n = t.elements.size();
  const Element e = t.identity;
  const auto& m = t.mult;
  const auto& d = t.dist;

  for (Element g = 0; g < n; ++g) {
    if (m[e][g] != g || m[g][e] != g) fail(MonoidAxiom::IdentityNotUnit, {g});
  }
  for (Element a = 0; a < n; ++a)
    for (Element b = 0; b < n; ++b)
      for (Element c = 0; c < n; ++c)
        if (m[m[a][b]][c] != m[a][m[b][c]]) fail(MonoidAxiom::NotAssociative, {a, b, c});

  for (Element g = 0; g < n; ++g)
    for (Element h = 0; h < n; ++h)
      if (d[g][h] < 0) fail(MonoidAxiom::NegativeDistance, {g, h});
  for (Element g = 0; g < n; ++g)
    if (d[g][g] != 0) fail(MonoidAxiom::NonZeroDiagonal, {g});
  for (Element g = 0; g < n; ++g)
    for (Element h = 0; h < n; ++h)
      if (g != h && d[g][h] == 0) fail(MonoidAxiom::NotSeparated, {g, h});

  // Left invariance is checked before symmetry so that a table which is
  // both asymmetric and non-invariant reports the translation witness.
  for (Element g = 0; g < n; ++g)
    for (Element h = 0; h < n; ++h)
      for (Element k = 0; k < n; ++k)
        if (d[m[g][h]][m[g][k]] != d[h][k]) fail(MonoidAxiom::LeftInvarianceViolated, {g, h, k});

  for (Element g = 0; g < n; ++g)
    for (Element h = g + 1; h < n; ++h)
      if (d[g][h] != d[h][g]) fail(MonoidAxiom::NotSymmetric, {g, h});
  for (Element g = 0; g < n; ++g)
    for (Element h = 0; h < n; ++h)
      for (Element k = 0; k < n; ++k)
        if (d[g][k] > d[g][h] + d[h][k]) fail(MonoidAxiom::TriangleViolated, {g, h, k});

  if (t.inverse) {
    for (Element g = 0; g < n; ++g) {
      const Element gi = (*t.inverse)[g];
      if (m[g][gi] != e || m[gi][g] != e) fail(MonoidAxiom::InverseInvalid, {g});
    }
  }
}

}  // namespace

MonoidAxiomError::MonoidAxiomError(MonoidAxiom axiom, std::vector<Element> witness)
    : DomainError(axiom_name(axiom), witness_text(witness), witness), axiom_(axiom) {}

FiniteMetricMonoid FiniteMetricMonoid::unchecked(MonoidTable table) {
  check_shape(table);
  FiniteMetricMonoid g;
  g.n_ = table.elements.size();
  g.identity_ = table.identity;
  g.names_ = std::move(table.elements);
  g.mult_.reserve(g.n_ * g.n_);
  g.dist_.reserve(g.n_ * g.n_);
  std::vector<Rational> values;
  for (std::size_t i = 0; i < g.n_; ++i) {
    for (std::size_t j = 0; j < g.n_; ++j) {
      g.mult_.push_back(table.mult[i][j]);
      Rational v = table.dist[i][j];
      v.canonicalize();
      g.dist_.push_back(v);
      values.push_back(v);
    }
  }
  values.emplace_back(0);
  g.realized_ = sorted_unique(std::move(values));
  g.inverse_ = std::move(table.inverse);
  return g;
}

FiniteMetricMonoid validate_monoid(MonoidTable raw) {
  check_shape(raw);
  check_axioms(raw);
  if (!raw.inverse) {
    // fill in the table when every element has a two-sided inverse
    const std::size_t n = raw.elements.size();
    std::vector<Element> inv(n);
    bool group = true;
    for (Element g = 0; g < n && group; ++g) {
      group = false;
      for (Element h = 0; h < n; ++h) {
        if (raw.mult[g][h] == raw.identity && raw.mult[h][g] == raw.identity) {
          inv[g] = h;
          group = true;
          break;
        }
      }
    }
    if (group) raw.inverse = std::move(inv);
  }
  return FiniteMetricMonoid::unchecked(std::move(raw));
}

Element FiniteMetricMonoid::inverse(Element g) const {
  if (!inverse_) throw DomainError("NotAGroup", "monoid has no inverse table");
  return (*inverse_)[g];
}

Element FiniteMetricMonoid::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw ParseError("unknown element '" + name + "'");
  return static_cast<Element>(it - names_.begin());
}

std::optional<Rational> FiniteMetricMonoid::min_positive_distance() const {
  if (realized_.size() < 2) return std::nullopt;
  return realized_[1];
}

MonoidTable FiniteMetricMonoid::table() const {
  MonoidTable t;
  t.elements = names_;
  t.identity = identity_;
  t.mult.assign(n_, std::vector<Element>(n_));
  t.dist.assign(n_, std::vector<Rational>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      t.mult[i][j] = mul(i, j);
      t.dist[i][j] = dist(i, j);
    }
  }
  t.inverse = inverse_;
  return t;
}

Ball ball(const FiniteMetricMonoid& g, Element center, const Rational& radius) {
  Ball b{center, radius, {}};
  for (Element h = 0; h < g.size(); ++h) {
    if (g.dist(center, h) <= radius) b.members.push_back(h);
  }
  return b;
}

std::vector<Element> identity_ball(const FiniteMetricMonoid& g, const Rational& radius) {
  return ball(g, g.identity(), radius).members;
}

Rational right_translation_dilation(const FiniteMetricMonoid& g, Element right) {
  // one element: the translation is the identity map, taken to have dilation 1
  if (g.size() == 1) return 1;
  Rational best = 0;
  for (Element h = 0; h < g.size(); ++h) {
    for (Element k = h + 1; k < g.size(); ++k) {
      Rational ratio = g.dist(g.mul(h, right), g.mul(k, right)) / g.dist(h, k);
      if (ratio > best) best = ratio;
    }
  }
  return best;
}

std::vector<Rational> modulus_candidates(const FiniteMetricMonoid& g) {
  std::vector<Rational> out(g.realized_distances().begin() + 1, g.realized_distances().end());
  out.push_back(g.diameter() + 1);
  return out;
}

std::optional<Rational> inverse_modulus(const FiniteMetricMonoid& g, const Rational& eps) {
  if (!g.is_group()) throw DomainError("NotAGroup", "inverse_modulus needs an inverse table");
  return largest_satisfying(modulus_candidates(g), [&](const Rational& omega) {
    for (Element a = 0; a < g.size(); ++a) {
      for (Element b = 0; b < g.size(); ++b) {
        if (g.dist(a, b) < omega && !(g.dist(g.inverse(a), g.inverse(b)) < eps)) return false;
      }
    }
    return true;
  });
}

std::optional<std::vector<Element>> find_isometric_isomorphism(const FiniteMetricMonoid& g1,
                                                                const FiniteMetricMonoid& g2) {
  const std::size_t n = g1.size();
  if (n != g2.size() || g1.realized_distances() != g2.realized_distances()) return std::nullopt;

  // Assign in order of distance from the identity so the isometry test on
  // norms prunes early.
  std::vector<Element> order(n);
  for (Element i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](Element a, Element b) {
    if (a == g1.identity()) return b != g1.identity();
    if (b == g1.identity()) return false;
    return g1.norm(a) < g1.norm(b);
  });

  constexpr Element kUnset = static_cast<Element>(-1);
  std::vector<Element> phi(n, kUnset);
  std::vector<bool> used(n, false);

  auto consistent = [&](Element a) {
    for (Element b = 0; b < n; ++b) {
      if (phi[b] == kUnset) continue;
      if (g2.dist(phi[a], phi[b]) != g1.dist(a, b)) return false;
      for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
        const Element xy = g1.mul(x, y);
        if (phi[xy] != kUnset && phi[xy] != g2.mul(phi[x], phi[y])) return false;
      }
    }
    // Products involving a whose images are already determined.
    for (Element b = 0; b < n; ++b) {
      if (phi[b] == kUnset) continue;
      for (Element c = 0; c < n; ++c) {
        if (phi[c] == kUnset) continue;
        const Element bc = g1.mul(b, c);
        if (bc == a && phi[a] != g2.mul(phi[b], phi[c])) return false;
      }
    }
    return true;
  };

  std::function<bool(std::size_t)> extend = [&](std::size_t pos) -> bool {
    if (pos == n) return true;
    const Element a = order[pos];
    for (Element v = 0; v < n; ++v) {
      if (used[v]) continue;
      if (a == g1.identity() && v != g2.identity()) continue;
      phi[a] = v;
      used[v] = true;
      if (consistent(a) && extend(pos + 1)) return true;
      used[v] = false;
      phi[a] = kUnset;
    }
    return false;
  };

  if (!extend(0)) return std::nullopt;
  return phi;
}

}  // namespace covprop
