/*
 * SPDX-License-Identifier: Apache-2.0
 */
// Acceptance suite: nine property checks, one PASS/FAIL line each.
// Exit status is the number of failed criteria (0 when all pass).

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "builders.hpp"
#include "corpus.hpp"
#include "covprop/chain.hpp"
#include "covprop/tunnels.hpp"
#include "covprop/upsilon.hpp"
#include "oracles.hpp"

using namespace covprop;
using namespace covprop::testing;

namespace {

// Pinned parameters.
constexpr std::uint64_t kSeed = 20240611;
constexpr int kLemmaPairs = 200;
constexpr std::size_t kPairsPerInstance = 24;
constexpr std::size_t kMaxSpacePoints = 3;
constexpr long kMaxDenominator = 6;
constexpr int kLipschitzSamples = 1000;
constexpr long kGrid = 8;  // simplex grid, and the tolerance diam / kGrid
constexpr int kTunnelDraws = 500;
const Rational kLimitTolerance(1, 4);
constexpr double kCriterion1Seconds = 300;
constexpr double kCriterion8Seconds = 600;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Relation = std::vector<std::pair<std::size_t, std::size_t>>;

std::vector<Relation> all_relations(std::size_t n, std::size_t m) {
  std::vector<Relation> out;
  for (std::uint32_t mask = 1; mask < (1u << (n * m)); ++mask) {
    std::vector<bool> c1(n), c2(m);
    Relation rel;
    for (std::size_t c = 0; c < n * m; ++c)
      if (mask >> c & 1) {
        rel.emplace_back(c / m, c % m);
        c1[c / m] = c2[c % m] = true;
      }
    if (std::count(c1.begin(), c1.end(), false) || std::count(c2.begin(), c2.end(), false)) continue;
    out.push_back(rel);
  }
  return out;
}

// Positive fractions p/q with q <= kMaxDenominator, up to 1.
std::vector<Rational> small_fractions() {
  std::vector<Rational> out;
  for (long d = 1; d <= kMaxDenominator; ++d)
    for (long p = 1; p <= d; ++p) out.push_back(make_rational(p, d));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Every metric space with at most kMaxSpacePoints points and distances
// among small_fractions().
std::vector<FiniteQCMS> small_spaces() {
  const auto fr = small_fractions();
  std::vector<FiniteQCMS> out{one_point()};
  for (const auto& a : fr) out.push_back(two_points(a));
  for (const auto& a : fr)
    for (const auto& b : fr)
      for (const auto& c : fr) {
        if (a > b + c || b > a + c || c > a + b) continue;
        out.push_back(space({{0, a, b}, {a, 0, c}, {b, c, 0}}));
      }
  return out;
}

State random_state(std::mt19937_64& rng, std::size_t n, long den) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<long> c(n, 0);
  for (long i = 0; i < den; ++i) ++c[pick(rng)];
  State s;
  for (auto v : c) s.push_back(make_rational(v, den));
  return s;
}

MarkovMap random_kernel(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  MarkovMap k(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto s = random_state(rng, cols, kMaxDenominator);
    for (std::size_t c = 0; c < cols; ++c) k(r, c) = s[c];
  }
  return k;
}

AlmostIsoPair swapped(const AlmostIsoPair& p) { return AlmostIsoPair{p.backward, p.forward, p.epsilon, p.radius}; }

// ---------------------------------------------------------------------

Outcome upsilon_metric_axioms() {
  const auto corpus = monoid_corpus();
  const std::size_t n = corpus.size();
  std::vector<std::vector<ExactReal>> u(n, std::vector<ExactReal>(n));
  std::size_t bad = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) u[i][j] = upsilon(corpus[i].monoid, corpus[j].monoid).value;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!(u[i][j] == u[j][i])) ++bad;
      if (u[i][j] > ExactReal::half_sqrt2()) ++bad;
      if ((u[i][j].sign() == 0) != oracle::isometric_isomorphic(corpus[i].monoid, corpus[j].monoid)) ++bad;
      for (std::size_t k = 0; k < n; ++k)
        if (u[i][k] > u[i][j] + u[j][k]) ++bad;
    }
  return {bad == 0, std::to_string(n) + " monoids, " + std::to_string(n * n * n) + " triples, " +
                        std::to_string(bad) + " violations"};
}

// Compared on the capped, scale-limited scale. The whole-space formula is
// counted too; it can exceed upsilon (trivial vs Z2 at 3/2: 3/4 > 2/3).
Outcome gh_domination() {
  const auto corpus = monoid_corpus();
  std::size_t bad = 0, pairs = 0, global_over = 0;
  for (const auto& a : corpus)
    for (const auto& b : corpus) {
      ++pairs;
      const auto u = upsilon(a.monoid, b.monoid).value;
      if (gh_pointed_local(a.monoid, b.monoid) > u) ++bad;
      if (ExactReal(gh_pointed(a.monoid, b.monoid)) > u) ++global_over;
    }
  return {bad == 0, std::to_string(pairs) + " pairs, " + std::to_string(bad) + " violations; whole-space formula above upsilon on " +
                        std::to_string(global_over)};
}

Outcome executable_lemmas() {
  std::mt19937_64 rng(kSeed);
  const auto corpus = monoid_corpus();
  std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
  int pairs = 0, failures = 0, composed = 0;
  while (pairs < kLemmaPairs) {
    const auto& a = corpus[pick(rng)].monoid;
    const auto& b = corpus[pick(rng)].monoid;
    const auto probes = epsilon_probes(critical_epsilons(a, b));
    if (probes.empty()) continue;
    const auto& pr = probes[std::uniform_int_distribution<std::size_t>(0, probes.size() - 1)(rng)];
    AlmostIsoSearch search(a, b, pr.epsilon, 1 / pr.epsilon);
    const auto found = search.enumerate(4);
    if (found.empty()) continue;
    const auto& p = found[std::uniform_int_distribution<std::size_t>(0, found.size() - 1)(rng)];
    ++pairs;
    if (!check_almost_iso(a, b, p).ok || !derived_properties(a, b, p).all_hold()) {
      ++failures;
      continue;
    }
    // composition: back through the reversed pair when the budget allows, else an identity step
    try {
      if (within_composition_range(2 * p.epsilon)) {
        const auto c = compose(a, b, a, p, swapped(p));
        if (!check_almost_iso(a, a, c).ok) ++failures;
        ++composed;
      } else if (within_composition_range(p.epsilon + make_rational(1, 100))) {
        const auto c = compose(a, b, b, p, identity_pair(b, make_rational(1, 100), 100));
        if (!check_almost_iso(a, b, c).ok) ++failures;
        ++composed;
      }
    } catch (const DomainError&) {
      ++failures;
    }
  }
  // inverse estimate on every group pair, every probe
  std::size_t inverse_checks = 0;
  for (const auto& a : corpus)
    for (const auto& b : corpus) {
      if (!a.monoid.is_group() || !b.monoid.is_group()) continue;
      for (const auto& pr : epsilon_probes(critical_epsilons(a.monoid, b.monoid))) {
        AlmostIsoSearch search(a.monoid, b.monoid, pr.epsilon, 1 / pr.epsilon);
        for (const auto& p : search.enumerate(kPairsPerInstance)) {
          ++inverse_checks;
          if (!check_inverse_estimate(a.monoid, b.monoid, p).ok) ++failures;
        }
      }
    }
  return {failures == 0, std::to_string(pairs) + " pairs, " + std::to_string(composed) + " compositions, " +
                             std::to_string(inverse_checks) + " inverse estimates, " + std::to_string(failures) +
                             " failures"};
}

Outcome transport_duality() {
  std::mt19937_64 rng(kSeed + 4);
  const auto spaces = small_spaces();
  std::size_t w1_checks = 0, mkd_checks = 0, samples = 0, bad = 0;
  for (const auto& x : spaces) {
    const auto states = oracle::simplex_grid(x.size(), kMaxDenominator);
    for (std::size_t i = 0; i < states.size(); ++i)
      for (std::size_t j = i + 1; j < states.size(); ++j) {
        ++w1_checks;
        if (w1(x, states[i], states[j]) != oracle::w1_dual(x, states[i], states[j])) ++bad;
      }
  }
  // mkD against its per-row reduction, then sampled lower bounds
  std::uniform_int_distribution<std::size_t> pick(0, spaces.size() - 1);
  std::uniform_int_distribution<std::size_t> rows(1, kMaxSpacePoints);
  while (samples < static_cast<std::size_t>(kLipschitzSamples)) {
    const auto& src = spaces[pick(rng)];
    const std::size_t r = rows(rng);
    const auto a = random_kernel(rng, r, src.size());
    const auto b = random_kernel(rng, r, src.size());
    const auto dst = two_points();  // only its size matters to the distance
    const auto v = mk_dist_maps(src, r == 2 ? dst : r == 1 ? one_point() : line({0, 1, 2}), a, b);
    Rational rowwise = 0;
    for (std::size_t row = 0; row < r; ++row) {
      State p, q2;
      for (std::size_t c = 0; c < src.size(); ++c) {
        p.push_back(a(row, c));
        q2.push_back(b(row, c));
      }
      rowwise = std::max<Rational>(rowwise, oracle::w1_dual(src, p, q2));
    }
    ++mkd_checks;
    if (v != rowwise) ++bad;
    for (int s = 0; s < 10 && samples < static_cast<std::size_t>(kLipschitzSamples); ++s, ++samples)
      if (oracle::mkd_lower(src, a, b, oracle::random_lipschitz(src, rng)) > v) ++bad;
  }
  return {bad == 0, std::to_string(spaces.size()) + " spaces, " + std::to_string(w1_checks) + " w1 pairs, " +
                        std::to_string(mkd_checks) + " mkD maps, " + std::to_string(samples) + " samples, " +
                        std::to_string(bad) + " mismatches"};
}

Outcome extent_reach_oracles() {
  std::size_t bad = 0, extents = 0, reaches = 0;
  // ambient spaces from bridge geometries between small spaces
  const std::vector<FiniteQCMS> xs = {one_point(), two_points(), two_points(make_rational(1, 2)), line({0, 1, 3}),
                                      line({0, 1, 2})};
  for (const auto& a : xs)
    for (const auto& b : xs) {
      if (a.size() + b.size() > 4) continue;
      for (const auto& rel : all_relations(a.size(), b.size()))
        for (const auto& eta : {make_rational(1, 2), Rational(1)}) {
          const Rational floor = correspondence_distortion(a.dist_matrix(), b.dist_matrix(), rel) / 2;
          const auto g = bridge_geometry(a, b, rel, std::max<Rational>(eta, floor));
          const Rational e = extent(g.ambient, g.embed1, g.embed2);
          const Rational grid = oracle::extent_grid(g.ambient, g.embed1, g.embed2, kGrid);
          ++extents;
          if (abs(e - grid) > g.ambient.diameter() / kGrid) ++bad;
        }
    }
  // other four-point ambients with overlapping embeddings
  std::mt19937_64 rng(kSeed + 5);
  std::uniform_int_distribution<long> w(1, 4);
  for (int t = 0; t < 12; ++t) {
    std::vector<std::vector<Rational>> d(4, std::vector<Rational>(4, 0));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) d[i][j] = d[j][i] = make_rational(w(rng), 2);
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
          if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    const auto z = space(d);
    const std::vector<std::size_t> e1 = t % 2 ? std::vector<std::size_t>{0, 1} : std::vector<std::size_t>{0};
    const std::vector<std::size_t> e2 = t % 3 ? std::vector<std::size_t>{2, 3} : std::vector<std::size_t>{1, 3};
    ++extents;
    if (abs(extent(z, e1, e2) - oracle::extent_grid(z, e1, e2, kGrid)) > z.diameter() / kGrid) ++bad;
  }

  // reach on three-point spaces
  const std::vector<LipschitzDynamicalSystem> systems = {
      trivial_system(two_points(), cyclic(2)),
      validate_system(two_points(), cyclic(2), {RationalMatrix::identity(2), permutation_kernel({1, 0})}),
      rotation_system(3),
      trivial_system(line({0, 1, 3}), cyclic(3)),
  };
  for (const auto& a : systems)
    for (const auto& b : systems) {
      const auto probes = epsilon_probes(critical_epsilons(a.monoid, b.monoid));
      std::optional<AlmostIsoPair> pair;
      for (const auto& pr : probes) {
        AlmostIsoSearch search(a.monoid, b.monoid, pr.epsilon, 1 / pr.epsilon);
        if ((pair = search.first())) break;
      }
      if (!pair) continue;
      const auto rels = candidate_correspondences(a.space, b.space, 4);
      for (std::size_t i = 0; i < rels.size() && i < 2; ++i) {
        const Rational floor = correspondence_distortion(a.space.dist_matrix(), b.space.dist_matrix(), rels[i]) / 2;
        const auto g = bridge_geometry(a.space, b.space, rels[i], std::max<Rational>(floor, make_rational(1, 4)));
        CovariantTunnel t{g.ambient, g.embed1, g.embed2, *pair, pair->epsilon};
        ++reaches;
        if (abs(reach(a, b, t) - oracle::reach_grid(a, b, t, kGrid)) > t.ambient.diameter() / kGrid) ++bad;
      }
    }
  return {bad == 0, std::to_string(extents) + " extents, " + std::to_string(reaches) + " reaches, " +
                        std::to_string(bad) + " outside diam/" + std::to_string(kGrid)};
}

Outcome tunnel_inequality() {
  std::mt19937_64 rng(kSeed + 6);
  const std::vector<FiniteQCMS> xs = {two_points(), line({0, 1, 3}), line({0, 2}), line({0, 1, 2})};
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  std::uniform_int_distribution<long> u(0, 12);
  int bad = 0;
  for (int draw = 0; draw < kTunnelDraws; ++draw) {
    const auto& x1 = xs[pick(rng)];
    const auto& x2 = xs[pick(rng)];
    const auto rels = all_relations(x1.size(), x2.size());
    const auto& rel = rels[std::uniform_int_distribution<std::size_t>(0, rels.size() - 1)(rng)];
    const auto g = bridge_geometry(x1, x2, rel, make_rational(1 + draw % 3, 2) +
                                                     correspondence_distortion(x1.dist_matrix(), x2.dist_matrix(), rel) / 2);
    const auto e = trivial_monoid();
    CovariantTunnel t{g.ambient, g.embed1, g.embed2, identity_pair(e, 1, 1), 1};
    const Rational ext = extent(t);
    const Rational l(1 + draw % 3);
    const auto a = oracle::random_lipschitz(x1, rng, l);
    const auto a2 = oracle::random_lipschitz(x1, rng, l);
    const auto b1 = target_set(t, a, l);
    const auto b2 = target_set(t, a2, l);
    Rational lhs = 0, base = 0;
    for (std::size_t z = 0; z < b1.lo.size(); ++z) {
      const Rational v1 = b1.lo[z] + (b1.hi[z] - b1.lo[z]) * make_rational(u(rng), 12);
      const Rational v2 = b2.lo[z] + (b2.hi[z] - b2.lo[z]) * make_rational(u(rng), 12);
      lhs = std::max<Rational>(lhs, abs(v1 - v2));
    }
    for (std::size_t i = 0; i < a.size(); ++i) base = std::max<Rational>(base, abs(a[i] - a2[i]));
    if (lhs > base + 2 * l * ext) ++bad;
  }
  return {bad == 0, std::to_string(kTunnelDraws) + " draws, " + std::to_string(bad) + " violations"};
}

std::vector<LipschitzDynamicalSystem> system_corpus() {
  std::vector<LipschitzDynamicalSystem> out;
  for (const auto& [label, g] : monoid_corpus()) out.push_back(trivial_system(two_points(), g));
  out.push_back(validate_system(two_points(), cyclic(2), {RationalMatrix::identity(2), permutation_kernel({1, 0})}));
  out.push_back(rotation_system(3));
  out.push_back(rotation_system(4));
  out.push_back(rotation_system(5, make_rational(1, 2)));
  out.push_back(parity_system(4));
  out.push_back(parity_system(6, make_rational(1, 2), make_rational(3, 2)));
  out.push_back(trivial_system(line({0, 1, 3}), cyclic(3)));
  return out;
}

Outcome self_distance() {
  std::size_t bad = 0;
  const auto systems = system_corpus();
  for (const auto& s : systems) {
    if (covprop_upper_bound(s, s).value.sign() != 0) ++bad;
    if (magnitude(s, s, self_tunnel(s, make_rational(1, 2))) != 0) ++bad;
  }
  return {bad == 0, std::to_string(systems.size()) + " systems, " + std::to_string(bad) + " nonzero"};
}

std::vector<LipschitzDynamicalSystem> refining_family(bool swap_on_odd) {
  std::vector<LipschitzDynamicalSystem> out;
  for (unsigned k = 1; k <= 4; ++k) {
    const std::size_t n = std::size_t(1) << k;
    out.push_back(swap_on_odd ? parity_system(n, make_rational(4, static_cast<long>(n)))
                              : trivial_system(two_points(), refining_cyclic(k)));
  }
  return out;
}

Outcome completeness_experiment() {
  const DilationProfile profile{{{100, 1}}};
  const std::vector<ModulusEntry> schedule{{make_rational(1, 2), make_rational(1, 2), 0}};
  LimitExperimentOptions opt;
  opt.tolerance = kLimitTolerance;
  std::ostringstream detail;
  bool pass = true;
  try {
    const auto r = limit_experiment(refining_family(false), std::nullopt, profile, schedule, opt);
    detail << "bounds";
    for (const auto& b : r.bounds) detail << " " << b.value.str();
    pass = r.non_increasing && r.below_tolerance;
  } catch (const DomainError& e) {
    detail << "refining family rejected: " << e.what();
    pass = false;
  }
  try {
    limit_experiment(refining_family(true), std::nullopt, profile, schedule, opt);
    detail << "; broken family accepted";
    pass = false;
  } catch (const HypothesisFailed& e) {
    detail << "; broken family rejected by hypothesis (" << e.hypothesis() << ")";
    pass = pass && e.hypothesis() == 4;
  }
  return {pass, detail.str()};
}

Outcome cauchy_soundness() {
  std::vector<MonoidChain> chains;
  for (const auto& [label, g] : monoid_corpus()) chains.push_back(identity_chain(g, 3, make_rational(1, 5)));
  {
    const auto z2 = cyclic(2, make_rational(1, 10));
    const auto e = trivial_monoid();
    MonoidChain c;
    c.monoids = {z2, e, z2};
    c.links = {AlmostIsoPair{to_identity(z2, e), to_identity(e, z2), make_rational(1, 10), 10},
               AlmostIsoPair{to_identity(e, z2), to_identity(z2, e), make_rational(1, 10), 10}};
    c.epsilons = {make_rational(1, 10), make_rational(1, 10)};
    chains.push_back(c);
  }
  // back-and-forth chains through attained witnesses
  const auto corpus = monoid_corpus();
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (std::size_t j = 0; j < corpus.size(); ++j) {
      const auto& a = corpus[i].monoid;
      const auto& b = corpus[j].monoid;
      if (a.size() * b.size() > 16) continue;
      const auto r = upsilon(a, b);
      if (!r.witness || !r.attained || r.isometric_isomorphism) continue;
      MonoidChain c;
      c.monoids = {a, b, a};
      c.links = {*r.witness, swapped(*r.witness)};
      c.epsilons = {r.witness->epsilon, r.witness->epsilon};
      try {
        validate_chain(c);
      } catch (const DomainError&) {
        continue;
      }
      chains.push_back(c);
    }
  std::size_t segments = 0, bad = 0;
  for (const auto& c : chains)
    for (std::size_t n = 0; n < c.monoids.size(); ++n)
      for (std::size_t m = n + 1; m < c.monoids.size(); ++m) {
        ++segments;
        if (cauchy_bound(c, n, m).value < upsilon(c.monoids[n], c.monoids[m]).value) ++bad;
      }
  return {bad == 0, std::to_string(chains.size()) + " chains, " + std::to_string(segments) + " segments, " +
                        std::to_string(bad) + " violations"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
    double seconds_limit;
  };
  const std::vector<Criterion> criteria = {
      {1, "upsilon metric axioms on the monoid corpus", upsilon_metric_axioms, kCriterion1Seconds},
      {2, "pointed GH never exceeds upsilon", gh_domination, 0},
      {3, "lemmas on random verified pairs", executable_lemmas, 0},
      {4, "w1 and mkD against duality oracles", transport_duality, 0},
      {5, "extent and reach against grid oracles", extent_reach_oracles, 0},
      {6, "target-set inequality", tunnel_inequality, 0},
      {7, "self distance is zero", self_distance, 0},
      {8, "refining cyclic limit experiment", completeness_experiment, kCriterion8Seconds},
      {9, "Cauchy bound dominates upsilon", cauchy_soundness, 0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.seconds_limit > 0 && secs > c.seconds_limit) {
      out.pass = false;
      out.detail += "; over the time limit";
    }
    std::printf("%s criterion %d: %s (%s; %.2fs)\n", out.pass ? "PASS" : "FAIL", c.id, c.title, out.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  return failed;
}
