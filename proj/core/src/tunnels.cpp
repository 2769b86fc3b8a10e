/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "covprop/tunnels.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "covprop/errors.hpp"
#include "covprop/transport.hpp"

namespace covprop {

namespace {

const Rational kHalf(1, 2);

bool below_cap(const Rational& v) { return v * v < kHalf; }

void check_embedding(const FiniteQCMS& ambient, const FiniteQCMS& space, const std::vector<std::size_t>& embed,
                     std::size_t j) {
  if (embed.size() != space.size()) throw DomainError("DimensionMismatch", "embedding length differs from space size");
  std::vector<bool> hit(ambient.size(), false);
  for (std::size_t x = 0; x < embed.size(); ++x) {
    if (embed[x] >= ambient.size()) throw DomainError("DimensionMismatch", "embedding leaves the ambient space");
    if (hit[embed[x]]) throw DomainError("NotInjective", "two points share an ambient image", {j, x});
    hit[embed[x]] = true;
  }
  for (std::size_t x = 0; x < embed.size(); ++x)
    for (std::size_t y = 0; y < embed.size(); ++y)
      if (ambient.dist(embed[x], embed[y]) != space.dist(x, y)) {
        throw DomainError("NotIsometricEmbedding", "embedding distorts a distance", {j, x, y});
      }
}

}  // namespace

void validate_tunnel(const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
                     const CovariantTunnel& tunnel) {
  check_embedding(tunnel.ambient, sys1.space, tunnel.embed1, 1);
  check_embedding(tunnel.ambient, sys2.space, tunnel.embed2, 2);
  const auto& p = tunnel.pair;
  if (p.forward.size() != sys1.monoid.size() || p.backward.size() != sys2.monoid.size()) {
    throw DomainError("DimensionMismatch", "pair maps do not match the monoids");
  }
  for (auto v : p.forward)
    if (v >= sys2.monoid.size()) throw DomainError("DimensionMismatch", "forward map leaves the target monoid");
  for (auto v : p.backward)
    if (v >= sys1.monoid.size()) throw DomainError("DimensionMismatch", "backward map leaves the source monoid");
  if (tunnel.epsilon <= 0) throw DomainError("PairNotCertified", "tunnel epsilon must be positive");
  const auto check = check_almost_iso(sys1.monoid, sys2.monoid, p.forward, p.backward, tunnel.epsilon,
                                      1 / tunnel.epsilon);
  if (!check.ok) {
    std::vector<std::size_t> w;
    if (check.witness && !check.witness->identity_failure) {
      w = {static_cast<std::size_t>(check.witness->orientation), check.witness->g, check.witness->g2,
           check.witness->h};
    }
    throw DomainError("PairNotCertified", "pair fails at (epsilon, 1/epsilon)", w);
  }
}

TargetSetBox target_set_ambient(const CovariantTunnel& tunnel, const std::vector<Rational>& a, const Rational& l) {
  const auto& z = tunnel.ambient;
  const auto& e1 = tunnel.embed1;
  if (a.size() != e1.size()) throw DomainError("DimensionMismatch", "function length differs from X1");
  Rational lip = 0;
  for (std::size_t x = 0; x < a.size(); ++x)
    for (std::size_t y = x + 1; y < a.size(); ++y) lip = std::max<Rational>(lip, abs(a[x] - a[y]) / z.dist(e1[x], e1[y]));
  if (l < lip) throw DomainError("SeminormExceeded", "l is below the Lipschitz constant " + to_string(lip));
  TargetSetBox box;
  for (std::size_t p = 0; p < z.size(); ++p) {
    Rational lo = a[0] - l * z.dist(p, e1[0]);
    Rational hi = a[0] + l * z.dist(p, e1[0]);
    for (std::size_t y = 1; y < a.size(); ++y) {
      lo = std::max<Rational>(lo, a[y] - l * z.dist(p, e1[y]));
      hi = std::min<Rational>(hi, a[y] + l * z.dist(p, e1[y]));
    }
    box.lo.push_back(lo);
    box.hi.push_back(hi);
  }
  return box;
}

TargetSetBox target_set(const CovariantTunnel& tunnel, const std::vector<Rational>& a, const Rational& l) {
  const auto full = target_set_ambient(tunnel, a, l);
  TargetSetBox box;
  for (auto p : tunnel.embed2) {
    box.lo.push_back(full.lo[p]);
    box.hi.push_back(full.hi[p]);
  }
  return box;
}

Rational extent(const FiniteQCMS& ambient, const std::vector<std::size_t>& embed1,
                const std::vector<std::size_t>& embed2) {
  Rational best = 0;
  for (const auto* embed : {&embed1, &embed2}) {
    for (std::size_t p = 0; p < ambient.size(); ++p) {
      Rational nearest = ambient.dist(p, (*embed)[0]);
      for (auto q : *embed) nearest = std::min<Rational>(nearest, ambient.dist(p, q));
      best = std::max<Rational>(best, nearest);
    }
  }
  return best;
}

Rational extent(const CovariantTunnel& tunnel) { return extent(tunnel.ambient, tunnel.embed1, tunnel.embed2); }

namespace {

// Both sides of one orientation of the reach.
struct ReachSide {
  const LipschitzDynamicalSystem& from;
  const LipschitzDynamicalSystem& to;
  const std::vector<std::size_t>& embed_from;
  const std::vector<std::size_t>& embed_to;
  const std::vector<Element>& map;
};

ReachSide side(const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
               const CovariantTunnel& tunnel, int orientation) {
  if (orientation == 1) return {sys1, sys2, tunnel.embed1, tunnel.embed2, tunnel.pair.forward};
  return {sys2, sys1, tunnel.embed2, tunnel.embed1, tunnel.pair.backward};
}

// inf over psi of max over g in G_from[1/eps] of W1 on Z between the
// pushforwards of phi K_g and psi K'_{map(g)}, as a linear program.
Rational inner_value(const ReachSide& s, const FiniteQCMS& ambient, const Rational& eps, const State& phi,
                     std::uint64_t& lps) {
  const auto ball = identity_ball(s.from.monoid, 1 / eps);
  const std::size_t nk = s.to.space.size();

  // Identify equal kernels on the target side so duplicate constraints merge.
  std::vector<Element> canon(s.to.monoid.size());
  for (Element h = 0; h < canon.size(); ++h) {
    canon[h] = h;
    for (Element q = 0; q < h; ++q) {
      if (s.to.action[q] == s.to.action[h]) {
        canon[h] = canon[q];
        break;
      }
    }
  }
  std::set<std::pair<std::vector<Rational>, Element>> blocks;
  for (auto g : ball) blocks.emplace(left_multiply(phi, s.from.action[g]), canon[s.map[g]]);

  LinearProgram lp;
  const std::size_t t = lp.add_variable(1);
  std::vector<std::size_t> psi(nk);
  std::vector<std::pair<std::size_t, Rational>> total;
  for (std::size_t a = 0; a < nk; ++a) {
    psi[a] = lp.add_variable(0);
    total.emplace_back(psi[a], Rational(1));
  }
  lp.add_equality(total, 1);

  for (const auto& [mu, h] : blocks) {
    const auto& kernel = s.to.action[h];
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < mu.size(); ++i)
      if (mu[i] != 0) support.push_back(i);
    std::vector<std::vector<std::size_t>> plan(support.size(), std::vector<std::size_t>(nk));
    std::vector<std::pair<std::size_t, Rational>> cost_row;
    for (std::size_t r = 0; r < support.size(); ++r) {
      std::vector<std::pair<std::size_t, Rational>> row;
      for (std::size_t b = 0; b < nk; ++b) {
        plan[r][b] = lp.add_variable(0);
        row.emplace_back(plan[r][b], Rational(1));
        cost_row.emplace_back(plan[r][b], ambient.dist(s.embed_from[support[r]], s.embed_to[b]));
      }
      lp.add_equality(row, mu[support[r]]);
    }
    for (std::size_t b = 0; b < nk; ++b) {
      std::vector<std::pair<std::size_t, Rational>> col;
      for (std::size_t r = 0; r < support.size(); ++r) col.emplace_back(plan[r][b], Rational(1));
      for (std::size_t a = 0; a < nk; ++a)
        if (kernel(a, b) != 0) col.emplace_back(psi[a], -kernel(a, b));
      lp.add_equality(col, 0);
    }
    cost_row.emplace_back(lp.add_variable(0), Rational(1));  // slack
    cost_row.emplace_back(t, Rational(-1));
    lp.add_equality(cost_row, 0);
  }
  const auto result = lp.solve();
  ++lps;
  if (result.status != LinearProgram::Status::Optimal) {
    throw DomainError("SolverFailure", "reach linear program did not reach an optimum");
  }
  return result.objective;
}

}  // namespace

Rational reach_at_state(const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
                        const CovariantTunnel& tunnel, int orientation, const State& phi) {
  const auto s = side(sys1, sys2, tunnel, orientation);
  validate_state(s.from.space, phi);
  std::uint64_t lps = 0;
  return inner_value(s, tunnel.ambient, tunnel.epsilon, phi, lps);
}

ReachReport reach_report(const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
                         const CovariantTunnel& tunnel) {
  if (tunnel.epsilon <= 0) throw DomainError("PairNotCertified", "tunnel epsilon must be positive");
  ReachReport report;
  report.value = 0;
  bool first = true;
  for (int orientation : {1, 2}) {
    const auto s = side(sys1, sys2, tunnel, orientation);
    for (std::size_t x = 0; x < s.from.space.size(); ++x) {
      const Rational v = inner_value(s, tunnel.ambient, tunnel.epsilon, dirac(s.from.space.size(), x), report.lps);
      if (first || v > report.value) {
        report.value = v;
        report.orientation = orientation;
        report.point = x;
        first = false;
      }
    }
  }
  return report;
}

Rational reach(const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
               const CovariantTunnel& tunnel) {
  return reach_report(sys1, sys2, tunnel).value;
}

Rational magnitude(const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
                   const CovariantTunnel& tunnel) {
  return std::max<Rational>(reach(sys1, sys2, tunnel), extent(tunnel));
}

std::vector<std::vector<std::size_t>> isometric_bijections(const FiniteQCMS& x1, const FiniteQCMS& x2) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t n = x1.size();
  if (n != x2.size()) return out;
  std::vector<std::size_t> map(n);
  std::vector<bool> used(n, false);
  std::function<void(std::size_t)> extend = [&](std::size_t x) {
    if (x == n) {
      out.push_back(map);
      return;
    }
    for (std::size_t y = 0; y < n; ++y) {
      if (used[y]) continue;
      bool ok = true;
      for (std::size_t p = 0; p < x && ok; ++p) ok = x2.dist(map[p], y) == x1.dist(p, x);
      if (!ok) continue;
      used[y] = true;
      map[x] = y;
      extend(x + 1);
      used[y] = false;
    }
  };
  extend(0);
  return out;
}

namespace {

// Every isometric monoid isomorphism G1 -> G2.
std::vector<std::vector<Element>> isometric_isomorphisms(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2) {
  std::vector<std::vector<Element>> out;
  const std::size_t n = g1.size();
  if (n != g2.size()) return out;
  constexpr Element kUnset = static_cast<Element>(-1);
  std::vector<Element> map(n, kUnset);
  std::vector<bool> used(n, false);
  map[g1.identity()] = g2.identity();
  used[g2.identity()] = true;
  std::vector<Element> order;
  for (Element a = 0; a < n; ++a)
    if (a != g1.identity()) order.push_back(a);

  auto consistent = [&]() {
    for (Element a = 0; a < n; ++a) {
      if (map[a] == kUnset) continue;
      for (Element b = 0; b < n; ++b) {
        if (map[b] == kUnset) continue;
        if (g2.dist(map[a], map[b]) != g1.dist(a, b)) return false;
        const Element ab = g1.mul(a, b);
        if (map[ab] != kUnset && map[ab] != g2.mul(map[a], map[b])) return false;
      }
    }
    return true;
  };
  std::function<void(std::size_t)> extend = [&](std::size_t k) {
    if (k == order.size()) {
      out.push_back(map);
      return;
    }
    const Element a = order[k];
    for (Element b = 0; b < n; ++b) {
      if (used[b]) continue;
      map[a] = b;
      used[b] = true;
      if (consistent()) extend(k + 1);
      used[b] = false;
      map[a] = kUnset;
    }
  };
  if (consistent()) extend(0);
  return out;
}

}  // namespace

std::optional<EquivariantIsomorphism> find_equivariant_isomorphism(const LipschitzDynamicalSystem& sys1,
                                                                   const LipschitzDynamicalSystem& sys2) {
  if (sys1.space.size() != sys2.space.size() || sys1.monoid.size() != sys2.monoid.size()) return std::nullopt;
  const auto points = isometric_bijections(sys1.space, sys2.space);
  if (points.empty()) return std::nullopt;
  const auto isos = isometric_isomorphisms(sys1.monoid, sys2.monoid);
  const std::size_t n = sys1.space.size();
  for (const auto& phi : isos) {
    for (const auto& s : points) {
      bool ok = true;
      for (Element g = 0; g < phi.size() && ok; ++g) {
        const auto& k1 = sys1.action[g];
        const auto& k2 = sys2.action[phi[g]];
        for (std::size_t x = 0; x < n && ok; ++x)
          for (std::size_t y = 0; y < n && ok; ++y) ok = k2(s[x], s[y]) == k1(x, y);
      }
      if (ok) return EquivariantIsomorphism{phi, s};
    }
  }
  return std::nullopt;
}

std::vector<std::vector<std::pair<std::size_t, std::size_t>>> candidate_correspondences(
    const FiniteQCMS& x1, const FiniteQCMS& x2, std::size_t exhaustive_limit) {
  using Relation = std::vector<std::pair<std::size_t, std::size_t>>;
  const std::size_t n1 = x1.size();
  const std::size_t n2 = x2.size();
  std::set<Relation> found;

  if (n1 <= exhaustive_limit && n2 <= exhaustive_limit) {
    std::vector<std::size_t> partner(n1);
    std::function<void(std::size_t)> cover_y;
    std::function<void(std::size_t)> choose_x = [&](std::size_t x) {
      if (x == n1) {
        cover_y(0);
        return;
      }
      for (std::size_t y = 0; y < n2; ++y) {
        partner[x] = y;
        choose_x(x + 1);
      }
    };
    Relation extra;
    cover_y = [&](std::size_t y) {
      if (y == n2) {
        Relation r = extra;
        for (std::size_t x = 0; x < n1; ++x) r.emplace_back(x, partner[x]);
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        found.insert(std::move(r));
        return;
      }
      if (std::find(partner.begin(), partner.end(), y) != partner.end()) {
        cover_y(y + 1);
        return;
      }
      for (std::size_t x = 0; x < n1; ++x) {
        extra.emplace_back(x, y);
        cover_y(y + 1);
        extra.pop_back();
      }
    };
    choose_x(0);
    return {found.begin(), found.end()};
  }

  // Greedy: add pairs one at a time, each minimizing the distortion so far.
  Relation r;
  auto added_distortion = [&](std::size_t x, std::size_t y) {
    Rational worst = 0;
    for (const auto& [p, q] : r) worst = std::max<Rational>(worst, abs(x1.dist(x, p) - x2.dist(y, q)));
    return worst;
  };
  std::vector<bool> covered(n2, false);
  for (std::size_t x = 0; x < n1; ++x) {
    std::size_t best = 0;
    for (std::size_t y = 1; y < n2; ++y)
      if (added_distortion(x, y) < added_distortion(x, best)) best = y;
    r.emplace_back(x, best);
    covered[best] = true;
  }
  for (std::size_t y = 0; y < n2; ++y) {
    if (covered[y]) continue;
    std::size_t best = 0;
    for (std::size_t x = 1; x < n1; ++x)
      if (added_distortion(x, y) < added_distortion(best, y)) best = x;
    r.emplace_back(best, y);
  }
  std::sort(r.begin(), r.end());
  return {r};
}

BridgeGeometry bridge_geometry(const FiniteQCMS& x1, const FiniteQCMS& x2,
                               const std::vector<std::pair<std::size_t, std::size_t>>& relation, const Rational& eta) {
  if (relation.empty()) throw DomainError("NotAMetric", "empty correspondence");
  const std::size_t n1 = x1.size();
  const std::size_t n2 = x2.size();
  std::vector<std::string> names;
  for (const auto& p : x1.names()) names.push_back("1:" + p);
  for (const auto& p : x2.names()) names.push_back("2:" + p);
  std::vector<std::vector<Rational>> d(n1 + n2, std::vector<Rational>(n1 + n2));
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n1; ++b) d[a][b] = x1.dist(a, b);
  for (std::size_t a = 0; a < n2; ++a)
    for (std::size_t b = 0; b < n2; ++b) d[n1 + a][n1 + b] = x2.dist(a, b);
  for (std::size_t a = 0; a < n1; ++a) {
    for (std::size_t b = 0; b < n2; ++b) {
      Rational best = x1.dist(a, relation[0].first) + eta + x2.dist(relation[0].second, b);
      for (const auto& [p, q] : relation) best = std::min<Rational>(best, x1.dist(a, p) + eta + x2.dist(q, b));
      d[a][n1 + b] = d[n1 + b][a] = best;
    }
  }
  BridgeGeometry g{FiniteQCMS::validate(std::move(names), std::move(d)), {}, {}, eta};
  for (std::size_t a = 0; a < n1; ++a) g.embed1.push_back(a);
  for (std::size_t b = 0; b < n2; ++b) g.embed2.push_back(n1 + b);
  return g;
}

namespace {

struct Geometry {
  FiniteQCMS ambient;
  std::vector<std::size_t> embed1;
  std::vector<std::size_t> embed2;
  Rational extent;
};

std::vector<Rational> default_eta_grid() {
  std::vector<Rational> grid;
  for (int k = 1; k <= 6; ++k) grid.emplace_back(1, 1 << k);
  return grid;
}

// Isometric identifications first, then one bridge per correspondence at the
// least admissible eta. Larger eta only lengthens cross distances, which can
// raise but never lower extent or reach, so the other grid values are dominated.
std::vector<Geometry> tunnel_geometries(const FiniteQCMS& x1, const FiniteQCMS& x2, const CovpropOptions& options) {
  std::vector<Geometry> out;
  for (const auto& s : isometric_bijections(x1, x2)) {
    std::vector<std::size_t> e1(x1.size());
    std::vector<std::size_t> e2(x2.size());
    for (std::size_t x = 0; x < x1.size(); ++x) {
      e1[x] = x;
      e2[s[x]] = x;
    }
    out.push_back({x1, e1, e2, Rational(0)});
  }
  const auto grid = options.eta_grid ? sorted_unique(*options.eta_grid) : default_eta_grid();
  std::set<std::vector<std::vector<Rational>>> seen;
  for (const auto& r : candidate_correspondences(x1, x2, options.exhaustive_limit)) {
    const Rational floor = correspondence_distortion(x1.dist_matrix(), x2.dist_matrix(), r) / 2;
    std::vector<Rational> etas;
    if (!options.eta_grid && floor > 0) etas.push_back(floor);
    for (const auto& eta : grid)
      if (eta > 0 && eta >= floor) etas.push_back(eta);
    if (etas.empty()) continue;
    const Rational eta = *std::min_element(etas.begin(), etas.end());
    auto b = bridge_geometry(x1, x2, r, eta);
    if (!seen.insert(b.ambient.dist_matrix()).second) continue;
    const Rational ext = extent(b.ambient, b.embed1, b.embed2);
    out.push_back({std::move(b.ambient), std::move(b.embed1), std::move(b.embed2), ext});
  }
  std::stable_sort(out.begin(), out.end(), [](const Geometry& a, const Geometry& b) { return a.extent < b.extent; });
  return out;
}

}  // namespace

CovpropResult covprop_upper_bound(const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
                                  const CovpropOptions& options) {
  const auto& g1 = sys1.monoid;
  const auto& g2 = sys2.monoid;
  if (g1.size() > options.budget || g2.size() > options.budget) {
    throw DomainError("SizeLimitExceeded", "monoid larger than the budget of " + std::to_string(options.budget));
  }
  CovpropResult result;

  if (const auto iso = find_equivariant_isomorphism(sys1, sys2)) {
    // Magnitude 0 at every epsilon; the witness is recorded at 1/2.
    std::vector<Element> back(g2.size());
    for (Element g = 0; g < g1.size(); ++g) back[iso->monoid_map[g]] = g;
    std::vector<std::size_t> e1(sys1.space.size());
    std::vector<std::size_t> e2(sys2.space.size());
    for (std::size_t x = 0; x < e1.size(); ++x) {
      e1[x] = x;
      e2[iso->point_map[x]] = x;
    }
    const Rational eps(1, 2);
    result.value = ExactReal(Rational(0));
    result.witness = CovariantTunnel{sys1.space, e1, e2, AlmostIsoPair{iso->monoid_map, back, eps, 1 / eps}, eps};
    result.equivariant_isomorphism = true;
    return result;
  }

  const auto geometries = tunnel_geometries(sys1.space, sys2.space, options);
  result.geometries = geometries.size();
  const auto probes = epsilon_probes(critical_epsilons(g1, g2));
  std::vector<std::optional<std::vector<AlmostIsoPair>>> pairs(probes.size());
  auto pairs_at = [&](std::size_t i) -> const std::vector<AlmostIsoPair>& {
    if (!pairs[i]) {
      AlmostIsoSearch search(g1, g2, probes[i].epsilon, 1 / probes[i].epsilon);
      pairs[i] = search.enumerate(options.pair_limit);
      result.search += search.stats();
    }
    return *pairs[i];
  };

  std::optional<Rational> best;
  std::optional<std::size_t> best_probe;
  for (const auto& geo : geometries) {
    if (!below_cap(geo.extent) || (best && geo.extent >= *best)) continue;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const auto& probe = probes[i];
      if (best && probe.left_critical >= *best) break;
      for (const auto& pair : pairs_at(i)) {
        CovariantTunnel tunnel{geo.ambient, geo.embed1, geo.embed2, pair, probe.epsilon};
        const auto r = reach_report(sys1, sys2, tunnel);
        ++result.tunnels_evaluated;
        result.lps += r.lps;
        const Rational v = std::max<Rational>({probe.left_critical, geo.extent, r.value});
        if (!below_cap(v) || (best && v >= *best)) continue;
        best = v;
        best_probe = i;
        result.witness = tunnel;
      }
    }
  }

  if (!best) {
    result.value = ExactReal::half_sqrt2();
    return result;
  }
  result.value = ExactReal(*best);
  const auto& probe = probes[*best_probe];
  result.attained = probe.at_critical || *best > probe.left_critical;
  if (result.attained && *best != result.witness->epsilon) {
    // Same open interval or above it, so the pair stays certified and the
    // smaller ball cannot raise the reach.
    CovariantTunnel moved = *result.witness;
    moved.epsilon = *best;
    moved.pair.epsilon = *best;
    moved.pair.radius = 1 / *best;
    validate_tunnel(sys1, sys2, moved);
    if (magnitude(sys1, sys2, moved) > *best) {
      throw DomainError("SolverFailure", "witness tunnel exceeds its bound after moving epsilon");
    }
    result.witness = moved;
  }
  return result;
}

Rational space_propinquity_bound(const FiniteQCMS& x1, const FiniteQCMS& x2, std::size_t exhaustive_limit) {
  if (!isometric_bijections(x1, x2).empty()) return 0;
  std::optional<Rational> best;
  for (const auto& r : candidate_correspondences(x1, x2, exhaustive_limit)) {
    const Rational v = correspondence_distortion(x1.dist_matrix(), x2.dist_matrix(), r) / 2;
    if (!best || v < *best) best = v;
  }
  return *best;
}

}  // namespace covprop
