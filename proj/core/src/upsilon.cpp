/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "covprop/upsilon.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>

#include "covprop/parallel.hpp"

namespace covprop {

namespace {

constexpr std::int32_t kFixed = -1;

std::vector<Rational> dilation_table(const FiniteMetricMonoid& g) {
  std::vector<Rational> out(g.size());
  for (Element x = 0; x < g.size(); ++x) out[x] = right_translation_dilation(g, x);
  return out;
}

}  // namespace

struct AlmostIsoSearch::Impl {
  struct Constraint {
    int side;  // orientation: g, gp range over monoid[side], h over monoid[1 - side]
    Element g, gp, h;
  };
  struct Variable {
    int side;
    Element elem;
    std::vector<Element> domain;
  };

  std::array<const FiniteMetricMonoid*, 2> monoid{};
  Rational epsilon;
  Rational radius;
  std::array<std::vector<Element>, 2> balls;

  std::size_t num_values = 0;
  std::array<std::vector<std::uint32_t>, 2> dist_id;
  std::vector<char> within;  // within[a * num_values + b]: |v_a - v_b| <= epsilon

  std::vector<Variable> vars;
  std::vector<std::vector<Constraint>> checks_at;  // by variable position
  std::vector<Constraint> root_checks;
  std::array<std::vector<Element>, 2> maps;  // maps[0]: G1 -> G2, maps[1]: G2 -> G1
  bool dead = false;
  SearchStats stats;

  Impl(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, Rational eps, Rational r, bool star)
      : monoid{&g1, &g2}, epsilon(std::move(eps)), radius(std::move(r)) {
    balls[0] = identity_ball(g1, radius);
    balls[1] = identity_ball(g2, radius);

    std::vector<Rational> values = g1.realized_distances();
    values.insert(values.end(), g2.realized_distances().begin(), g2.realized_distances().end());
    values = sorted_unique(std::move(values));
    num_values = values.size();
    for (int s = 0; s < 2; ++s) {
      const auto& m = *monoid[s];
      dist_id[s].resize(m.size() * m.size());
      for (Element a = 0; a < m.size(); ++a) {
        for (Element b = 0; b < m.size(); ++b) {
          auto it = std::lower_bound(values.begin(), values.end(), m.dist(a, b));
          dist_id[s][a * m.size() + b] = static_cast<std::uint32_t>(it - values.begin());
        }
      }
    }
    within.resize(num_values * num_values);
    for (std::size_t a = 0; a < num_values; ++a)
      for (std::size_t b = 0; b < num_values; ++b) within[a * num_values + b] = abs(values[a] - values[b]) <= epsilon;

    std::array<std::vector<Rational>, 2> dil;
    if (star) {
      dil[0] = dilation_table(g1);
      dil[1] = dilation_table(g2);
    }
    auto star_ok = [&](int side, Element x, Element v) {
      return !star || abs(dil[side][x] - dil[1 - side][v]) < epsilon;
    };

    maps[0].assign(g1.size(), 0);
    maps[1].assign(g2.size(), 0);
    std::array<std::vector<std::int32_t>, 2> position{std::vector<std::int32_t>(g1.size(), kFixed),
                                                      std::vector<std::int32_t>(g2.size(), kFixed)};
    for (int s = 0; s < 2; ++s) {
      const auto& from = *monoid[s];
      const auto& to = *monoid[1 - s];
      maps[s][from.identity()] = to.identity();
      if (!star_ok(s, from.identity(), to.identity())) dead = true;
      // Elements outside the ball are unconstrained except by the starred
      // dilation condition; extend with the smallest admissible image.
      std::vector<bool> in_ball(from.size(), false);
      for (Element x : balls[s]) in_ball[x] = true;
      for (Element x = 0; x < from.size(); ++x) {
        if (in_ball[x]) continue;
        bool found = false;
        for (Element v = 0; v < to.size() && !found; ++v) {
          if (star_ok(s, x, v)) {
            maps[s][x] = v;
            found = true;
          }
        }
        if (!found) dead = true;
      }
      for (Element x : balls[s]) {
        if (x == from.identity()) continue;
        Variable var{s, x, {}};
        const Rational bound = from.norm(x) + epsilon;
        for (Element v = 0; v < to.size(); ++v) {
          if (to.norm(v) <= bound && star_ok(s, x, v)) var.domain.push_back(v);
        }
        if (var.domain.empty()) dead = true;
        vars.push_back(std::move(var));
      }
    }
    std::stable_sort(vars.begin(), vars.end(), [&](const Variable& a, const Variable& b) {
      const Rational& na = monoid[a.side]->norm(a.elem);
      const Rational& nb = monoid[b.side]->norm(b.elem);
      if (na != nb) return na < nb;
      if (a.side != b.side) return a.side < b.side;
      return a.elem < b.elem;
    });
    for (std::size_t p = 0; p < vars.size(); ++p) position[vars[p].side][vars[p].elem] = static_cast<std::int32_t>(p);

    checks_at.resize(vars.size());
    for (int s = 0; s < 2; ++s) {
      for (Element gp : balls[s]) {
        for (Element g : balls[s]) {
          for (Element h : balls[1 - s]) {
            const std::int32_t p =
                std::max({position[s][g], position[s][gp], position[1 - s][h]});
            Constraint c{s, g, gp, h};
            if (p == kFixed) {
              root_checks.push_back(c);
            } else {
              checks_at[static_cast<std::size_t>(p)].push_back(c);
            }
          }
        }
      }
    }
    for (const auto& c : root_checks) {
      if (!satisfied(c)) dead = true;
    }
  }

  bool satisfied(const Constraint& c) const {
    const auto& from = *monoid[c.side];
    const auto& to = *monoid[1 - c.side];
    const auto& there = maps[c.side];
    const auto& back = maps[1 - c.side];
    const Element image = to.mul(there[c.g], there[c.gp]);
    const std::uint32_t lhs = dist_id[1 - c.side][image * to.size() + c.h];
    const std::uint32_t rhs = dist_id[c.side][from.mul(c.g, c.gp) * from.size() + back[c.h]];
    return within[lhs * num_values + rhs] != 0;
  }

  // Calls on_solution for each complete assignment until it returns true.
  bool search(std::size_t pos, const std::function<bool()>& on_solution) {
    if (pos == vars.size()) return on_solution();
    const Variable& var = vars[pos];
    for (Element v : var.domain) {
      ++stats.nodes;
      maps[var.side][var.elem] = v;
      bool ok = true;
      for (const auto& c : checks_at[pos]) {
        if (!satisfied(c)) {
          ok = false;
          break;
        }
      }
      if (ok && search(pos + 1, on_solution)) return true;
    }
    return false;
  }

  AlmostIsoPair current() const { return AlmostIsoPair{maps[0], maps[1], epsilon, radius}; }
};

AlmostIsoSearch::AlmostIsoSearch(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, Rational epsilon,
                                 Rational radius, bool star)
    : impl_(std::make_unique<Impl>(g1, g2, std::move(epsilon), std::move(radius), star)) {}
AlmostIsoSearch::~AlmostIsoSearch() = default;
AlmostIsoSearch::AlmostIsoSearch(AlmostIsoSearch&&) noexcept = default;
AlmostIsoSearch& AlmostIsoSearch::operator=(AlmostIsoSearch&&) noexcept = default;

std::optional<AlmostIsoPair> AlmostIsoSearch::first() {
  ++impl_->stats.probes;
  if (impl_->dead) return std::nullopt;
  std::optional<AlmostIsoPair> found;
  impl_->search(0, [&] {
    found = impl_->current();
    return true;
  });
  return found;
}

std::vector<AlmostIsoPair> AlmostIsoSearch::enumerate(std::size_t limit) {
  ++impl_->stats.probes;
  std::vector<AlmostIsoPair> out;
  if (impl_->dead || limit == 0) return out;
  impl_->search(0, [&] {
    out.push_back(impl_->current());
    return out.size() >= limit;
  });
  return out;
}

const SearchStats& AlmostIsoSearch::stats() const { return impl_->stats; }

std::vector<Rational> critical_epsilons(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, bool star) {
  std::vector<Rational> values = g1.realized_distances();
  values.insert(values.end(), g2.realized_distances().begin(), g2.realized_distances().end());
  values = sorted_unique(std::move(values));
  std::vector<Rational> out;
  for (const auto& a : values) {
    out.push_back(a);
    if (a > 0) out.push_back(1 / a);
    for (const auto& b : values) out.push_back(abs(a - b));
  }
  if (star) {
    std::vector<Rational> dils = dilation_table(g1);
    auto d2 = dilation_table(g2);
    dils.insert(dils.end(), d2.begin(), d2.end());
    dils = sorted_unique(std::move(dils));
    for (const auto& a : dils)
      for (const auto& b : dils) out.push_back(abs(a - b));
  }
  out.emplace_back(0);
  return sorted_unique(std::move(out));
}

std::vector<EpsilonProbe> epsilon_probes(const std::vector<Rational>& criticals) {
  const Rational half(1, 2);
  std::vector<EpsilonProbe> probes;
  for (std::size_t i = 0; i < criticals.size(); ++i) {
    const Rational& c = criticals[i];
    if (c * c >= half) break;
    if (c > 0) probes.push_back({c, c, true});
    const Rational next = i + 1 < criticals.size() ? criticals[i + 1] : Rational(c + 1);
    probes.push_back({(c + next) / 2, c, false});
  }
  return probes;
}

namespace {

UpsilonResult solve_upsilon(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                            const UpsilonOptions& options, bool star) {
  if (g1.size() > options.budget || g2.size() > options.budget) {
    throw DomainError("SizeLimitExceeded", "monoid larger than the budget of " + std::to_string(options.budget));
  }
  auto probes = epsilon_probes(critical_epsilons(g1, g2, star));

  UpsilonResult result;
  std::vector<std::optional<AlmostIsoPair>> found(probes.size());
  std::vector<SearchStats> stats(probes.size());
  auto run = [&](std::size_t i) {
    AlmostIsoSearch search(g1, g2, probes[i].epsilon, 1 / probes[i].epsilon, star);
    found[i] = search.first();
    stats[i] = search.stats();
  };

  if (options.verify_monotone) {
    parallel_for(probes.size(), options.jobs, run);
  } else {
    for (std::size_t i = 0; i < probes.size(); ++i) {
      run(i);
      if (found[i]) {
        probes.resize(i + 1);
        found.resize(i + 1);
        stats.resize(i + 1);
        break;
      }
    }
  }

  std::optional<std::size_t> first_feasible;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    result.stats += stats[i];
    result.criticals_tested.push_back(probes[i].epsilon);
    result.feasible.push_back(found[i].has_value());
    if (found[i] && !first_feasible) first_feasible = i;
    if (!found[i] && first_feasible) {
      throw DomainError("MonotonicityViolated",
                        "feasible at " + to_string(probes[*first_feasible].epsilon) + " but not at " +
                            to_string(probes[i].epsilon));
    }
  }

  // Distance zero happens exactly when an isometric isomorphism exists.
  const bool zero = first_feasible && probes[*first_feasible].left_critical == 0;
  std::optional<std::vector<Element>> iso;
  if (g1.size() == g2.size()) iso = find_isometric_isomorphism(g1, g2);
  if (zero != iso.has_value()) {
    throw DomainError("IndiscerniblesMismatch", "zero-distance probe and isomorphism search disagree");
  }

  if (!first_feasible) {
    result.value = ExactReal::half_sqrt2();
    return result;
  }
  const EpsilonProbe& p = probes[*first_feasible];
  result.value = ExactReal(p.left_critical);
  if (zero && iso) {
    std::vector<Element> back(g2.size());
    for (Element g = 0; g < g1.size(); ++g) back[(*iso)[g]] = g;
    const Rational whole = std::max(g1.diameter(), g2.diameter());
    AlmostIsoPair pair{*iso, back, Rational(0), whole};
    const bool certified = check_almost_iso(g1, g2, pair).ok;
    if (certified) {
      result.witness = pair;
      result.attained = true;
      result.isometric_isomorphism = true;
      return result;
    }
  }
  result.witness = found[*first_feasible];
  result.attained = p.at_critical;
  return result;
}

}  // namespace

UpsilonResult upsilon(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, const UpsilonOptions& options) {
  return solve_upsilon(g1, g2, options, false);
}

UpsilonResult upsilon_star(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, const UpsilonOptions& options) {
  // The published display writes the first dilation over H with g in G;
  // we read it as the right translation by g on G itself, the only
  // type-correct reading, and mirror it for the backward map.
  return solve_upsilon(g1, g2, options, true);
}

Rational correspondence_distortion(const std::vector<std::vector<Rational>>& d1,
                                   const std::vector<std::vector<Rational>>& d2,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& relation) {
  Rational worst = 0;
  for (const auto& [x, y] : relation) {
    for (const auto& [xp, yp] : relation) {
      Rational gap = abs(d1[x][xp] - d2[y][yp]);
      if (gap > worst) worst = gap;
    }
  }
  return worst;
}

namespace {

// Is there a relation on xs1 x xs2 (both containing the identities) that
// contains (e1, e2), projects onto both sets and has distortion <= bound?
// Any such relation contains one built from a choice of partner for each x
// plus partners for the points left uncovered; distortion is monotone under
// inclusion, so searching those is exhaustive.
bool pointed_correspondence(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                            const std::vector<Element>& xs1, const std::vector<Element>& xs2, const Rational& bound) {
  std::vector<std::pair<Element, Element>> rel{{g1.identity(), g2.identity()}};
  auto compatible = [&](Element x, Element y) {
    for (const auto& [a, b] : rel) {
      if (abs(g1.dist(x, a) - g2.dist(y, b)) > bound) return false;
    }
    return true;
  };
  std::vector<Element> xs;
  for (Element x : xs1)
    if (x != g1.identity()) xs.push_back(x);

  std::function<bool(std::size_t)> cover_y = [&](std::size_t i) -> bool {
    if (i == xs2.size()) return true;
    const Element y = xs2[i];
    const bool covered = std::any_of(rel.begin(), rel.end(), [y](const auto& p) { return p.second == y; });
    if (covered) return cover_y(i + 1);
    for (Element x : xs1) {
      if (!compatible(x, y)) continue;
      rel.emplace_back(x, y);
      if (cover_y(i + 1)) return true;
      rel.pop_back();
    }
    return false;
  };
  std::function<bool(std::size_t)> cover_x = [&](std::size_t i) -> bool {
    if (i == xs.size()) return cover_y(0);
    for (Element y : xs2) {
      if (!compatible(xs[i], y)) continue;
      rel.emplace_back(xs[i], y);
      if (cover_x(i + 1)) return true;
      rel.pop_back();
    }
    return false;
  };
  return cover_x(0);
}

void check_gh_size(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, std::size_t size_limit) {
  if (g1.size() > size_limit || g2.size() > size_limit) {
    throw DomainError("SizeLimitExceeded", "gh_pointed is exhaustive and limited to " +
                                               std::to_string(size_limit) + " elements");
  }
}

}  // namespace

Rational gh_pointed(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, std::size_t size_limit) {
  check_gh_size(g1, g2, size_limit);
  std::vector<Rational> candidates;
  for (const auto& a : g1.realized_distances())
    for (const auto& b : g2.realized_distances()) candidates.push_back(abs(a - b));
  candidates = sorted_unique(std::move(candidates));
  const auto all1 = identity_ball(g1, g1.diameter());
  const auto all2 = identity_ball(g2, g2.diameter());
  for (const auto& c : candidates) {
    if (pointed_correspondence(g1, g2, all1, all2, c)) return c / 2;
  }
  return candidates.back() / 2;  // unreachable: the full product has distortion <= max candidate
}

ExactReal gh_pointed_local(const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2, std::size_t size_limit) {
  check_gh_size(g1, g2, size_limit);
  // feasibility only changes where a ball boundary 1/d or a distortion
  // threshold |a - b| / 2 is crossed
  std::vector<Rational> crit{Rational(0)};
  for (const auto* g : {&g1, &g2})
    for (const auto& d : g->realized_distances())
      if (d > 0) crit.push_back(1 / d);
  for (const auto& a : g1.realized_distances())
    for (const auto& b : g2.realized_distances()) crit.push_back(abs(a - b) / 2);
  crit = sorted_unique(std::move(crit));
  for (const auto& probe : epsilon_probes(crit)) {
    if (probe.epsilon <= 0) continue;
    const Rational r = 1 / probe.epsilon;
    if (pointed_correspondence(g1, g2, identity_ball(g1, r), identity_ball(g2, r), 2 * probe.epsilon)) {
      return ExactReal(probe.left_critical);
    }
  }
  return ExactReal::half_sqrt2();
}

}  // namespace covprop
