/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "covprop/qcms.hpp"

#include <algorithm>
#include <map>

#include "covprop/errors.hpp"

namespace covprop {

FiniteQCMS FiniteQCMS::validate(std::vector<std::string> points, std::vector<std::vector<Rational>> dist) {
  const std::size_t n = points.size();
  if (n == 0) throw DomainError("NotAMetric", "a space needs at least one point");
  if (dist.size() != n) throw DomainError("DimensionMismatch", "dist has the wrong number of rows");
  for (const auto& row : dist) {
    if (row.size() != n) throw DomainError("DimensionMismatch", "dist is not square");
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (dist[x][x] != 0) throw DomainError("NotAMetric", "non-zero diagonal", {x});
    for (std::size_t y = 0; y < n; ++y) {
      if (dist[x][y] < 0) throw DomainError("NotAMetric", "negative distance", {x, y});
      if (x != y && dist[x][y] == 0) throw DomainError("NotAMetric", "distinct points at distance 0", {x, y});
      if (dist[x][y] != dist[y][x]) throw DomainError("NotAMetric", "asymmetric distance", {x, y});
    }
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t z = 0; z < n; ++z)
        if (dist[x][z] > dist[x][y] + dist[y][z]) throw DomainError("NotAMetric", "triangle inequality", {x, y, z});
  FiniteQCMS out;
  out.points_ = std::move(points);
  out.dist_ = std::move(dist);
  return out;
}

std::size_t FiniteQCMS::index_of(const std::string& name) const {
  const auto it = std::find(points_.begin(), points_.end(), name);
  if (it == points_.end()) throw ParseError("unknown point '" + name + "'");
  return static_cast<std::size_t>(it - points_.begin());
}

Rational FiniteQCMS::diameter() const {
  Rational best = 0;
  for (const auto& row : dist_)
    for (const auto& d : row) best = std::max<Rational>(best, d);
  return best;
}

RationalMatrix FiniteQCMS::cost_matrix() const {
  RationalMatrix c(size(), size());
  for (std::size_t x = 0; x < size(); ++x)
    for (std::size_t y = 0; y < size(); ++y) c(x, y) = dist_[x][y];
  return c;
}

void validate_state(const FiniteQCMS& space, const State& state) {
  if (state.size() != space.size()) throw DomainError("DimensionMismatch", "state length differs from space size");
  Rational total = 0;
  for (std::size_t x = 0; x < state.size(); ++x) {
    if (state[x] < 0) throw DomainError("InvalidState", "negative weight", {x});
    total += state[x];
  }
  if (total != 1) throw DomainError("InvalidState", "weights do not sum to 1");
}

State dirac(std::size_t size, std::size_t point) {
  State s(size, Rational(0));
  s[point] = 1;
  return s;
}

Rational lipschitz_constant(const FiniteQCMS& space, const std::vector<Rational>& a) {
  if (a.size() != space.size()) throw DomainError("DimensionMismatch", "function length differs from space size");
  Rational best = 0;
  for (std::size_t x = 0; x < a.size(); ++x)
    for (std::size_t y = x + 1; y < a.size(); ++y) best = std::max<Rational>(best, abs(a[x] - a[y]) / space.dist(x, y));
  return best;
}

void validate_markov(const MarkovMap& kernel, std::size_t dst_size, std::size_t src_size) {
  if (kernel.rows() != dst_size || kernel.cols() != src_size) {
    throw DomainError("DimensionMismatch", "kernel shape does not match the spaces");
  }
  for (std::size_t r = 0; r < kernel.rows(); ++r) {
    Rational total = 0;
    for (std::size_t c = 0; c < kernel.cols(); ++c) {
      if (kernel(r, c) < 0) throw DomainError("NotStochastic", "negative kernel entry", {r, c});
      total += kernel(r, c);
    }
    if (total != 1) throw DomainError("NotStochastic", "kernel row does not sum to 1", {r});
  }
}

TransportPlan w1_plan(const FiniteQCMS& space, const State& mu, const State& nu) {
  if (mu.size() != space.size() || nu.size() != space.size()) {
    throw DomainError("DimensionMismatch", "state length differs from space size");
  }
  return solve_transport(mu, nu, space.cost_matrix());
}

Rational w1(const FiniteQCMS& space, const State& mu, const State& nu) {
  if (mu == nu) {
    if (mu.size() != space.size()) throw DomainError("DimensionMismatch", "state length differs from space size");
    return 0;
  }
  return w1_plan(space, mu, nu).cost;
}

Rational mk_dist_maps(const FiniteQCMS& src, const FiniteQCMS& dst, const MarkovMap& alpha, const MarkovMap& beta) {
  validate_markov(alpha, dst.size(), src.size());
  validate_markov(beta, dst.size(), src.size());
  Rational best = 0;
  for (std::size_t x = 0; x < dst.size(); ++x) best = std::max<Rational>(best, w1(src, alpha.row(x), beta.row(x)));
  return best;
}

Rational dil_markov(const FiniteQCMS& src, const FiniteQCMS& dst, const MarkovMap& alpha) {
  validate_markov(alpha, dst.size(), src.size());
  Rational best = 0;
  for (std::size_t x = 0; x < dst.size(); ++x)
    for (std::size_t y = x + 1; y < dst.size(); ++y)
      best = std::max<Rational>(best, w1(src, alpha.row(x), alpha.row(y)) / dst.dist(x, y));
  return best;
}

Rational dil_markov(const FiniteQCMS& space, const MarkovMap& alpha) { return dil_markov(space, space, alpha); }

LipschitzDynamicalSystem validate_system(FiniteQCMS space, FiniteMetricMonoid monoid, std::vector<MarkovMap> action) {
  const std::size_t n = monoid.size();
  if (action.size() != n) throw DomainError("DimensionMismatch", "one kernel per monoid element is required");
  for (const auto& k : action) validate_markov(k, space.size(), space.size());
  const Element e = monoid.identity();
  if (!(action[e] == RationalMatrix::identity(space.size()))) {
    throw DomainError("IdentityNotFixed", "the identity does not act trivially", {e});
  }
  for (Element g = 0; g < n; ++g) {
    for (Element h = 0; h < n; ++h) {
      if (!(action[monoid.mul(g, h)] == action[g] * action[h])) {
        throw DomainError("ActionNotMorphism", "action(gh) != action(g) o action(h)", {g, h});
      }
    }
  }
  std::vector<Rational> dil(n);
  for (Element g = 0; g < n; ++g) dil[g] = dil_markov(space, action[g]);
  return LipschitzDynamicalSystem{std::move(space), std::move(monoid), std::move(action), std::move(dil)};
}

namespace {

// mkD between all pairs of kernels, computed once.
std::vector<std::vector<Rational>> action_distances(const LipschitzDynamicalSystem& sys) {
  const std::size_t n = sys.monoid.size();
  std::vector<std::vector<Rational>> out(n, std::vector<Rational>(n, Rational(0)));
  for (Element g = 0; g < n; ++g)
    for (Element h = g + 1; h < n; ++h)
      out[g][h] = out[h][g] = mk_dist_maps(sys.space, sys.space, sys.action[g], sys.action[h]);
  return out;
}

}  // namespace

std::optional<Rational> action_modulus(const LipschitzDynamicalSystem& sys, const Rational& eps) {
  const auto mk = action_distances(sys);
  const auto& m = sys.monoid;
  return largest_satisfying(modulus_candidates(m), [&](const Rational& omega) {
    for (Element g = 0; g < m.size(); ++g)
      for (Element h = 0; h < m.size(); ++h)
        if (m.dist(g, h) < omega && !(mk[g][h] < eps)) return false;
    return true;
  });
}

std::optional<std::pair<Element, Element>> action_modulus_violation(const LipschitzDynamicalSystem& sys,
                                                                    const Rational& eps, const Rational& omega) {
  const auto& m = sys.monoid;
  for (Element g = 0; g < m.size(); ++g) {
    for (Element h = 0; h < m.size(); ++h) {
      if (m.dist(g, h) < omega && mk_dist_maps(sys.space, sys.space, sys.action[g], sys.action[h]) >= eps) {
        return std::pair{g, h};
      }
    }
  }
  return std::nullopt;
}

std::optional<std::vector<std::size_t>> kernel_permutation(const MarkovMap& kernel) {
  if (kernel.rows() != kernel.cols()) return std::nullopt;
  const std::size_t n = kernel.rows();
  std::vector<std::size_t> perm(n);
  std::vector<bool> hit(n, false);
  for (std::size_t r = 0; r < n; ++r) {
    std::optional<std::size_t> one;
    for (std::size_t c = 0; c < n; ++c) {
      if (kernel(r, c) == 1 && !one) {
        one = c;
      } else if (kernel(r, c) != 0) {
        return std::nullopt;
      }
    }
    if (!one || hit[*one]) return std::nullopt;
    hit[*one] = true;
    perm[r] = *one;
  }
  return perm;
}

FiniteMetricMonoid induced_length_metric(const LipschitzDynamicalSystem& sys) {
  const auto& g = sys.monoid;
  const auto& x = sys.space;
  if (!g.is_group()) throw DomainError("NotAGroup", "induced_length_metric needs a group");
  const std::size_t n = g.size();
  for (Element a = 0; a < n; ++a) {
    const auto perm = kernel_permutation(sys.action[a]);
    if (!perm) throw DomainError("NotFullIsometry", "kernel is not a point permutation", {a});
    for (std::size_t p = 0; p < x.size(); ++p)
      for (std::size_t q = 0; q < x.size(); ++q)
        if (x.dist((*perm)[p], (*perm)[q]) != x.dist(p, q)) {
          throw DomainError("NotFullIsometry", "permutation is not an isometry", {a});
        }
  }
  const auto id = RationalMatrix::identity(x.size());
  std::vector<Rational> length(n);
  for (Element a = 0; a < n; ++a) length[a] = mk_dist_maps(x, x, sys.action[a], id);

  // Cosets gK, each represented by its smallest member.
  std::vector<Element> rep(n);
  for (Element a = 0; a < n; ++a) {
    rep[a] = a;
    for (Element b = 0; b < a; ++b) {
      if (length[g.mul(g.inverse(b), a)] == 0) {
        rep[a] = rep[b];
        break;
      }
    }
  }
  // K is the kernel of a homomorphism, so normality must hold; check anyway.
  for (Element a = 0; a < n; ++a)
    for (Element k = 0; k < n; ++k)
      if (length[k] == 0 && length[g.mul(g.mul(a, k), g.inverse(a))] != 0) {
        throw DomainError("KernelNotNormal", "zero-length elements do not form a normal subgroup", {a, k});
      }

  std::vector<Element> reps;
  std::map<Element, Element> slot;
  for (Element a = 0; a < n; ++a) {
    if (rep[a] == a) {
      slot[a] = reps.size();
      reps.push_back(a);
    }
  }
  const std::size_t m = reps.size();
  MonoidTable t;
  t.identity = slot.at(rep[g.identity()]);
  t.mult.assign(m, std::vector<Element>(m));
  t.dist.assign(m, std::vector<Rational>(m));
  std::vector<Element> inv(m);
  for (std::size_t i = 0; i < m; ++i) {
    t.elements.push_back(g.name(reps[i]));
    inv[i] = slot.at(rep[g.inverse(reps[i])]);
    for (std::size_t j = 0; j < m; ++j) {
      t.mult[i][j] = slot.at(rep[g.mul(reps[i], reps[j])]);
      t.dist[i][j] = length[g.mul(g.inverse(reps[i]), reps[j])];
    }
  }
  t.inverse = inv;
  return validate_monoid(std::move(t));
}

}  // namespace covprop
