/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

// Independent reference computations. Nothing here calls the solver under
// test for the quantity being checked; these are slow, direct evaluations
// of the definitions, meant for tiny instances only.

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "covprop/monoid.hpp"
#include "covprop/qcms.hpp"
#include "covprop/transport.hpp"
#include "covprop/tunnels.hpp"

namespace covprop::oracle {

// ---------- monoids ----------

// Direct reading of the defining inequality, both orientations.
inline bool almost_iso(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, const std::vector<Element>& f,
                       const std::vector<Element>& k, const Rational& eps, const Rational& r) {
  if (f[g1.identity()] != g2.identity() || k[g2.identity()] != g1.identity()) return false;
  auto side = [&](const FiniteMetricMonoid& gj, const FiniteMetricMonoid& gk, const std::vector<Element>& fj,
                  const std::vector<Element>& fk) {
    for (Element a = 0; a < gj.size(); ++a) {
      if (gj.norm(a) > r) continue;
      for (Element b = 0; b < gj.size(); ++b) {
        if (gj.norm(b) > r) continue;
        for (Element h = 0; h < gk.size(); ++h) {
          if (gk.norm(h) > r) continue;
          const Rational lhs = gk.dist(gk.mul(fj[a], fj[b]), h);
          const Rational rhs = gj.dist(gj.mul(a, b), fk[h]);
          if (abs(lhs - rhs) > eps) return false;
        }
      }
    }
    return true;
  };
  return side(g1, g2, f, k) && side(g2, g1, k, f);
}

// Every critical value, by the same three families but computed here.
inline std::vector<Rational> criticals(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2) {
  std::vector<Rational> ds;
  for (const auto* g : {&g1, &g2})
    for (Element a = 0; a < g->size(); ++a)
      for (Element b = 0; b < g->size(); ++b) ds.push_back(g->dist(a, b));
  std::vector<Rational> out;
  for (const auto& a : ds) {
    out.push_back(a);
    if (a > 0) out.push_back(1 / a);
    for (const auto& b : ds) out.push_back(abs(a - b));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Odometer over all maps src -> dst restricted to `domain`, identity fixed.
inline bool next_map(std::vector<Element>& map, const std::vector<Element>& domain, std::size_t range) {
  for (auto x : domain) {
    if (++map[x] < range) return true;
    map[x] = 0;
  }
  return false;
}

inline bool feasible(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, const Rational& eps) {
  const Rational r = 1 / eps;
  std::vector<Element> d1, d2;
  for (Element a = 0; a < g1.size(); ++a)
    if (a != g1.identity() && g1.norm(a) <= r) d1.push_back(a);
  for (Element a = 0; a < g2.size(); ++a)
    if (a != g2.identity() && g2.norm(a) <= r) d2.push_back(a);
  std::vector<Element> f(g1.size(), 0), k(g2.size(), 0);
  f[g1.identity()] = g2.identity();
  k[g2.identity()] = g1.identity();
  for (auto x : d1) f[x] = 0;
  do {
    std::fill(k.begin(), k.end(), 0);
    k[g2.identity()] = g1.identity();
    do {
      if (almost_iso(g1, g2, f, k, eps, r)) return true;
    } while (next_map(k, d2, g1.size()));
  } while (next_map(f, d1, g2.size()));
  return false;
}

// Exact distance by brute force over every map pair, as (value, is_cap).
// Only for monoids of up to 4 elements.
struct BruteUpsilon {
  Rational value;
  bool cap = false;
};

inline BruteUpsilon upsilon(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2) {
  const auto crit = criticals(g1, g2);
  // (probe, infimum if this is the first feasible probe)
  std::vector<std::pair<Rational, Rational>> probes;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    if (crit[i] * crit[i] >= make_rational(1, 2)) break;
    if (crit[i] > 0) probes.emplace_back(crit[i], crit[i]);
    probes.emplace_back(i + 1 < crit.size() ? Rational((crit[i] + crit[i + 1]) / 2) : Rational(crit[i] + 1), crit[i]);
  }
  for (const auto& [e, left] : probes)
    if (feasible(g1, g2, e)) return {left, false};
  return {0, true};
}

// Exhaustive isometric isomorphism test.
inline bool isometric_isomorphic(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2) {
  if (g1.size() != g2.size()) return false;
  std::vector<Element> p(g1.size());
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = p[g1.identity()] == g2.identity();
    for (Element a = 0; ok && a < g1.size(); ++a)
      for (Element b = 0; ok && b < g1.size(); ++b)
        ok = p[g1.mul(a, b)] == g2.mul(p[a], p[b]) && g1.dist(a, b) == g2.dist(p[a], p[b]);
    if (ok) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

// Half the least distortion over every relation containing (e1, e2)
// that projects onto both sides. Enumerates subsets of G1 x G2.
inline Rational gh_pointed(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2) {
  const std::size_t n = g1.size(), m = g2.size();
  std::optional<Rational> best;
  const std::size_t cells = n * m;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << cells); ++mask) {
    if (!(mask >> (g1.identity() * m + g2.identity()) & 1)) continue;
    std::vector<bool> c1(n), c2(m);
    std::vector<std::pair<Element, Element>> rel;
    for (std::size_t c = 0; c < cells; ++c)
      if (mask >> c & 1) {
        rel.emplace_back(c / m, c % m);
        c1[c / m] = true;
        c2[c % m] = true;
      }
    if (std::count(c1.begin(), c1.end(), false) || std::count(c2.begin(), c2.end(), false)) continue;
    Rational dis = 0;
    for (auto [a, b] : rel)
      for (auto [a2, b2] : rel) dis = std::max<Rational>(dis, abs(g1.dist(a, a2) - g2.dist(b, b2)));
    if (!best || dis < *best) best = dis;
  }
  return *best / 2;
}

// ---------- transport ----------

// W1 as a generic equality-form LP (a different code path from the
// transportation simplex).
inline Rational w1_lp(const std::vector<std::vector<Rational>>& d, const std::vector<Rational>& mu,
                      const std::vector<Rational>& nu) {
  const std::size_t n = mu.size(), m = nu.size();
  LinearProgram lp;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) lp.add_variable(d[i][j]);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<std::size_t, Rational>> row;
    for (std::size_t j = 0; j < m; ++j) row.emplace_back(i * m + j, 1);
    lp.add_equality(row, mu[i]);
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::pair<std::size_t, Rational>> col;
    for (std::size_t i = 0; i < n; ++i) col.emplace_back(i * m + j, 1);
    lp.add_equality(col, nu[j]);
  }
  return lp.solve().objective;
}

// Solves a small dense square system by Gaussian elimination; nullopt if singular.
inline std::optional<std::vector<Rational>> solve_dense(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

// Vertices of { a : a(0) = 0, |a(x) - a(y)| <= d(x, y) }.
inline std::vector<std::vector<Rational>> lipschitz_ball_vertices(const FiniteQCMS& x) {
  const std::size_t n = x.size();
  std::vector<std::vector<Rational>> out;
  if (n == 1) return {{Rational(0)}};
  // constraints s * (a(p) - a(q)) <= d(p, q) in variables a(1..n-1)
  struct Con {
    std::vector<Rational> row;
    Rational rhs;
  };
  std::vector<Con> cons;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t qq = 0; qq < n; ++qq) {
      if (p == qq) continue;
      std::vector<Rational> row(n - 1, 0);
      if (p) row[p - 1] += 1;
      if (qq) row[qq - 1] -= 1;
      cons.push_back({row, x.dist(p, qq)});
    }
  const std::size_t k = n - 1;
  std::vector<std::size_t> pick(k);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == k) {
      std::vector<std::vector<Rational>> a;
      std::vector<Rational> b;
      for (auto i : pick) {
        a.push_back(cons[i].row);
        b.push_back(cons[i].rhs);
      }
      const auto sol = solve_dense(a, b);
      if (!sol) return;
      for (const auto& c : cons) {
        Rational lhs = 0;
        for (std::size_t i = 0; i < k; ++i) lhs += c.row[i] * (*sol)[i];
        if (lhs > c.rhs) return;
      }
      std::vector<Rational> full{Rational(0)};
      full.insert(full.end(), sol->begin(), sol->end());
      if (std::find(out.begin(), out.end(), full) == out.end()) out.push_back(full);
      return;
    }
    for (std::size_t i = start; i < cons.size(); ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

// The dual side: max over ball vertices of |sum a (mu - nu)|.
inline Rational w1_dual(const FiniteQCMS& x, const State& mu, const State& nu) {
  Rational best = 0;
  for (const auto& a : lipschitz_ball_vertices(x)) {
    Rational s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += a[i] * (mu[i] - nu[i]);
    best = std::max<Rational>(best, abs(s));
  }
  return best;
}

// Every state with weights in (1/q) Z.
inline std::vector<State> simplex_grid(std::size_t n, long qd) {
  std::vector<State> out;
  std::vector<long> c(n, 0);
  std::function<void(std::size_t, long)> rec = [&](std::size_t i, long left) {
    if (i + 1 == n) {
      c[i] = left;
      State s;
      for (auto v : c) s.push_back(make_rational(v, qd));
      out.push_back(s);
      return;
    }
    for (long v = 0; v <= left; ++v) {
      c[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, qd);
  return out;
}

inline std::vector<Rational> random_lipschitz(const FiniteQCMS& x, std::mt19937_64& rng, const Rational& l = 1) {
  std::uniform_int_distribution<long> u(-60, 60);
  std::vector<Rational> a(x.size());
  for (auto& v : a) v = make_rational(u(rng), 12);
  const Rational lip = lipschitz_constant(x, a);
  if (lip > 0)
    for (auto& v : a) v *= l / lip;
  return a;
}

inline std::vector<Rational> apply(const MarkovMap& k, const std::vector<Rational>& a) {
  std::vector<Rational> out(k.rows(), 0);
  for (std::size_t r = 0; r < k.rows(); ++r)
    for (std::size_t c = 0; c < k.cols(); ++c) out[r] += k(r, c) * a[c];
  return out;
}

// Sampled lower bound on mkD: sup over Lipschitz-1 a of ||alpha a - beta a||_inf.
inline Rational mkd_lower(const FiniteQCMS& src, const MarkovMap& alpha, const MarkovMap& beta,
                          const std::vector<Rational>& a) {
  const auto x = apply(alpha, a);
  const auto y = apply(beta, a);
  Rational best = 0;
  for (std::size_t i = 0; i < x.size(); ++i) best = std::max<Rational>(best, abs(x[i] - y[i]));
  (void)src;
  return best;
}

// ---------- tunnels ----------

inline State push(const State& s, const std::vector<std::size_t>& embed, std::size_t ambient) {
  State out(ambient, 0);
  for (std::size_t i = 0; i < s.size(); ++i) out[embed[i]] += s[i];
  return out;
}

// Hausdorff distance between P(Z) and P(embed_j X_j), both discretized.
inline Rational extent_grid(const FiniteQCMS& z, const std::vector<std::size_t>& e1,
                            const std::vector<std::size_t>& e2, long qd) {
  const auto& d = z.dist_matrix();
  const auto zs = simplex_grid(z.size(), qd);
  Rational worst = 0;
  for (const auto* e : {&e1, &e2}) {
    const auto ys = simplex_grid(e->size(), qd);
    for (const auto& mu : zs) {
      std::optional<Rational> near;
      for (const auto& nu : ys) {
        const Rational v = w1_lp(d, mu, push(nu, *e, z.size()));
        if (!near || v < *near) near = v;
        if (*near == 0) break;
      }
      worst = std::max<Rational>(worst, *near);
    }
  }
  return worst;
}

// Reach with both the outer sup and the inner inf over grid states.
inline Rational reach_grid(const LipschitzDynamicalSystem& s1, const LipschitzDynamicalSystem& s2,
                           const CovariantTunnel& t, long qd) {
  const auto& d = t.ambient.dist_matrix();
  const Rational r = 1 / t.epsilon;
  Rational worst = 0;
  for (int o = 1; o <= 2; ++o) {
    const auto& sj = o == 1 ? s1 : s2;
    const auto& sk = o == 1 ? s2 : s1;
    const auto& ej = o == 1 ? t.embed1 : t.embed2;
    const auto& ek = o == 1 ? t.embed2 : t.embed1;
    const auto& fj = o == 1 ? t.pair.forward : t.pair.backward;
    std::vector<Element> ball;
    for (Element g = 0; g < sj.monoid.size(); ++g)
      if (sj.monoid.norm(g) <= r) ball.push_back(g);
    const auto phis = simplex_grid(sj.space.size(), qd);
    const auto psis = simplex_grid(sk.space.size(), qd);
    for (const auto& phi : phis) {
      std::optional<Rational> inner;
      for (const auto& psi : psis) {
        Rational sup = 0;
        for (auto g : ball) {
          const auto a = push(left_multiply(phi, sj.action[g]), ej, t.ambient.size());
          const auto b = push(left_multiply(psi, sk.action[fj[g]]), ek, t.ambient.size());
          sup = std::max<Rational>(sup, w1_lp(d, a, b));
          if (inner && sup >= *inner) break;
        }
        if (!inner || sup < *inner) inner = sup;
      }
      worst = std::max<Rational>(worst, *inner);
    }
  }
  return worst;
}

}  // namespace covprop::oracle
