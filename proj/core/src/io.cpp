/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "covprop/io.hpp"

#include <fstream>
#include <sstream>

#include "covprop/errors.hpp"

namespace covprop::io {

namespace {

std::string field(const std::string& locus, const std::string& name) { return locus + "." + name; }
std::string item(const std::string& locus, std::size_t i) { return locus + "[" + std::to_string(i) + "]"; }

const Json& require(const Json& j, const char* key, const std::string& locus) {
  if (!j.is_object()) throw ParseError("expected an object", locus);
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'", locus);
  return *it;
}

const Json& require_array(const Json& j, const std::string& locus) {
  if (!j.is_array()) throw ParseError("expected an array", locus);
  return j;
}

std::vector<std::string> names_from(const Json& j, const std::string& locus) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < require_array(j, locus).size(); ++i) {
    const auto& v = j[i];
    if (v.is_string()) {
      out.push_back(v.get<std::string>());
    } else if (v.is_number_integer()) {
      out.push_back(std::to_string(v.get<long long>()));
    } else {
      throw ParseError("expected a name", item(locus, i));
    }
  }
  for (std::size_t a = 0; a < out.size(); ++a)
    for (std::size_t b = a + 1; b < out.size(); ++b)
      if (out[a] == out[b]) throw ParseError("duplicate name '" + out[a] + "'", item(locus, b));
  return out;
}

// A name from `names`, or an index below names.size().
std::size_t ref_from(const Json& j, const std::vector<std::string>& names, const std::string& locus) {
  if (j.is_number_unsigned() || j.is_number_integer()) {
    const long long v = j.get<long long>();
    if (v < 0 || static_cast<std::size_t>(v) >= names.size()) throw ParseError("index out of range", locus);
    return static_cast<std::size_t>(v);
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == s) return i;
    throw ParseError("unknown name '" + s + "'", locus);
  }
  throw ParseError("expected a name or index", locus);
}

std::vector<std::size_t> refs_from(const Json& j, const std::vector<std::string>& names, std::size_t expected,
                                   const std::string& locus) {
  require_array(j, locus);
  if (j.size() != expected) {
    throw ParseError("expected " + std::to_string(expected) + " entries, got " + std::to_string(j.size()), locus);
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(ref_from(j[i], names, item(locus, i)));
  return out;
}

std::vector<std::vector<Rational>> square_from(const Json& j, std::size_t n, const std::string& locus) {
  require_array(j, locus);
  if (j.size() != n) throw ParseError("expected " + std::to_string(n) + " rows", locus);
  std::vector<std::vector<Rational>> out(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto loc = item(locus, r);
    require_array(j[r], loc);
    if (j[r].size() != n) throw ParseError("expected " + std::to_string(n) + " columns", loc);
    for (std::size_t c = 0; c < n; ++c) out[r].push_back(rational_from(j[r][c], item(loc, c)));
  }
  return out;
}

Json names_to(const std::vector<std::string>& names) {
  Json out = Json::array();
  for (const auto& n : names) out.push_back(n);
  return out;
}

std::size_t index_from(const Json& j, const std::string& locus) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ParseError("expected a non-negative integer", locus);
  return j.get<std::size_t>();
}

}  // namespace

Json load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file", path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), path.string());
  }
}

void save_file(const std::filesystem::path& path, const Json& value) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file", path.string());
  out << value.dump(2) << '\n';
}

Rational rational_from(const Json& j, const std::string& locus) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(e.what(), locus);
    }
  }
  if (j.is_number_float()) throw ParseError("decimals are not accepted; write \"p/q\"", locus);
  throw ParseError("expected a rational \"p/q\"", locus);
}

Json rational_to(const Rational& value) { return to_string(value); }
Json exact_to(const ExactReal& value) { return value.str(); }

MonoidTable monoid_table_from(const Json& j, const std::string& locus) {
  MonoidTable t;
  t.elements = names_from(require(j, "elements", locus), field(locus, "elements"));
  const std::size_t n = t.elements.size();
  if (n == 0) throw ParseError("a monoid needs at least one element", field(locus, "elements"));
  t.identity = ref_from(require(j, "identity", locus), t.elements, field(locus, "identity"));
  const auto& mult = require(j, "mult", locus);
  const auto mloc = field(locus, "mult");
  require_array(mult, mloc);
  if (mult.size() != n) throw ParseError("expected " + std::to_string(n) + " rows", mloc);
  for (std::size_t r = 0; r < n; ++r) t.mult.push_back(refs_from(mult[r], t.elements, n, item(mloc, r)));
  t.dist = square_from(require(j, "dist", locus), n, field(locus, "dist"));
  const auto it = j.find("inverse");
  if (it != j.end() && !it->is_null()) t.inverse = refs_from(*it, t.elements, n, field(locus, "inverse"));
  return t;
}

FiniteMetricMonoid monoid_from(const Json& j, const std::string& locus) {
  return validate_monoid(monoid_table_from(j, locus));
}

Json monoid_to(const FiniteMetricMonoid& g) {
  Json out;
  out["elements"] = names_to(g.names());
  out["identity"] = g.name(g.identity());
  Json mult = Json::array();
  Json dist = Json::array();
  for (Element a = 0; a < g.size(); ++a) {
    Json mrow = Json::array();
    Json drow = Json::array();
    for (Element b = 0; b < g.size(); ++b) {
      mrow.push_back(g.name(g.mul(a, b)));
      drow.push_back(rational_to(g.dist(a, b)));
    }
    mult.push_back(mrow);
    dist.push_back(drow);
  }
  out["mult"] = mult;
  out["dist"] = dist;
  if (g.is_group()) {
    Json inv = Json::array();
    for (Element a = 0; a < g.size(); ++a) inv.push_back(g.name(g.inverse(a)));
    out["inverse"] = inv;
  } else {
    out["inverse"] = nullptr;
  }
  return out;
}

AlmostIsoPair pair_from(const Json& j, const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                        const std::string& locus) {
  AlmostIsoPair p;
  p.forward = refs_from(require(j, "forward", locus), g2.names(), g1.size(), field(locus, "forward"));
  p.backward = refs_from(require(j, "backward", locus), g1.names(), g2.size(), field(locus, "backward"));
  p.epsilon = rational_from(require(j, "epsilon", locus), field(locus, "epsilon"));
  p.radius = rational_from(require(j, "radius", locus), field(locus, "radius"));
  if (p.epsilon < 0) throw ParseError("epsilon must be non-negative", field(locus, "epsilon"));
  if (p.radius < 0) throw ParseError("radius must be non-negative", field(locus, "radius"));
  return p;
}

Json pair_to(const AlmostIsoPair& pair, const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2) {
  Json out;
  Json fwd = Json::array();
  Json bwd = Json::array();
  for (auto v : pair.forward) fwd.push_back(g2.name(v));
  for (auto v : pair.backward) bwd.push_back(g1.name(v));
  out["forward"] = fwd;
  out["backward"] = bwd;
  out["epsilon"] = rational_to(pair.epsilon);
  out["radius"] = rational_to(pair.radius);
  return out;
}

FiniteQCMS space_from(const Json& j, const std::string& locus) {
  auto names = names_from(require(j, "points", locus), field(locus, "points"));
  auto dist = square_from(require(j, "dist", locus), names.size(), field(locus, "dist"));
  return FiniteQCMS::validate(std::move(names), std::move(dist));
}

Json space_to(const FiniteQCMS& space) {
  Json out;
  out["points"] = names_to(space.names());
  Json dist = Json::array();
  for (const auto& row : space.dist_matrix()) {
    Json r = Json::array();
    for (const auto& d : row) r.push_back(rational_to(d));
    dist.push_back(r);
  }
  out["dist"] = dist;
  return out;
}

State state_from(const Json& j, const FiniteQCMS& space, const std::string& locus) {
  const Json& w = j.is_object() ? require(j, "weights", locus) : j;
  const auto loc = j.is_object() ? field(locus, "weights") : locus;
  require_array(w, loc);
  if (w.size() != space.size()) throw ParseError("expected " + std::to_string(space.size()) + " weights", loc);
  State s;
  for (std::size_t i = 0; i < w.size(); ++i) s.push_back(rational_from(w[i], item(loc, i)));
  validate_state(space, s);
  return s;
}

Json state_to(const State& state) {
  Json w = Json::array();
  for (const auto& v : state) w.push_back(rational_to(v));
  Json out;
  out["weights"] = w;
  return out;
}

MarkovMap kernel_from(const Json& j, std::size_t rows, std::size_t cols, const std::string& locus) {
  require_array(j, locus);
  if (j.size() != rows) throw ParseError("expected " + std::to_string(rows) + " rows", locus);
  MarkovMap k(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto loc = item(locus, r);
    require_array(j[r], loc);
    if (j[r].size() != cols) throw ParseError("expected " + std::to_string(cols) + " columns", loc);
    for (std::size_t c = 0; c < cols; ++c) k(r, c) = rational_from(j[r][c], item(loc, c));
  }
  return k;
}

Json kernel_to(const MarkovMap& kernel) {
  Json out = Json::array();
  for (std::size_t r = 0; r < kernel.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < kernel.cols(); ++c) row.push_back(rational_to(kernel(r, c)));
    out.push_back(row);
  }
  return out;
}

Json resolve(const Json& j, const std::filesystem::path& base, const std::string& locus) {
  if (j.is_string()) {
    const std::filesystem::path p = base / j.get<std::string>();
    return load_file(p);
  }
  if (!j.is_object()) throw ParseError("expected an object or a file path", locus);
  return j;
}

LipschitzDynamicalSystem system_from(const Json& j, const std::filesystem::path& base, const std::string& locus) {
  auto space = space_from(resolve(require(j, "space", locus), base, field(locus, "space")), field(locus, "space"));
  auto monoid =
      monoid_from(resolve(require(j, "monoid", locus), base, field(locus, "monoid")), field(locus, "monoid"));
  const auto& action = require(j, "action", locus);
  const auto aloc = field(locus, "action");
  const std::size_t n = space.size();
  std::vector<MarkovMap> kernels;
  if (action.is_string() && action.get<std::string>() == "trivial") {
    kernels.assign(monoid.size(), RationalMatrix::identity(n));
  } else if (action.is_object()) {
    for (Element g = 0; g < monoid.size(); ++g) {
      const auto it = action.find(monoid.name(g));
      if (it == action.end()) throw ParseError("no kernel for element '" + monoid.name(g) + "'", aloc);
      kernels.push_back(kernel_from(*it, n, n, field(aloc, monoid.name(g))));
    }
    for (auto it = action.begin(); it != action.end(); ++it) monoid.index_of(it.key());
  } else if (action.is_array()) {
    if (action.size() != monoid.size()) throw ParseError("expected one kernel per element", aloc);
    for (std::size_t g = 0; g < action.size(); ++g) kernels.push_back(kernel_from(action[g], n, n, item(aloc, g)));
  } else {
    throw ParseError("expected an object of kernels, an array, or \"trivial\"", aloc);
  }
  return validate_system(std::move(space), std::move(monoid), std::move(kernels));
}

Json system_to(const LipschitzDynamicalSystem& sys) {
  Json out;
  out["space"] = space_to(sys.space);
  out["monoid"] = monoid_to(sys.monoid);
  Json action;
  for (Element g = 0; g < sys.monoid.size(); ++g) action[sys.monoid.name(g)] = kernel_to(sys.action[g]);
  out["action"] = action;
  return out;
}

CovariantTunnel tunnel_from(const Json& j, const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
                            const std::filesystem::path& base, const std::string& locus) {
  auto ambient =
      space_from(resolve(require(j, "ambient", locus), base, field(locus, "ambient")), field(locus, "ambient"));
  auto e1 = refs_from(require(j, "embed1", locus), ambient.names(), sys1.space.size(), field(locus, "embed1"));
  auto e2 = refs_from(require(j, "embed2", locus), ambient.names(), sys2.space.size(), field(locus, "embed2"));
  auto pair = pair_from(require(j, "pair", locus), sys1.monoid, sys2.monoid, field(locus, "pair"));
  Rational eps = pair.epsilon;
  if (j.contains("epsilon")) eps = rational_from(j["epsilon"], field(locus, "epsilon"));
  CovariantTunnel t{std::move(ambient), std::move(e1), std::move(e2), std::move(pair), eps};
  validate_tunnel(sys1, sys2, t);
  return t;
}

Json tunnel_to(const CovariantTunnel& tunnel, const LipschitzDynamicalSystem& sys1,
               const LipschitzDynamicalSystem& sys2) {
  Json out;
  out["ambient"] = space_to(tunnel.ambient);
  Json e1 = Json::array();
  Json e2 = Json::array();
  for (auto p : tunnel.embed1) e1.push_back(tunnel.ambient.name(p));
  for (auto p : tunnel.embed2) e2.push_back(tunnel.ambient.name(p));
  out["embed1"] = e1;
  out["embed2"] = e2;
  out["pair"] = pair_to(tunnel.pair, sys1.monoid, sys2.monoid);
  out["epsilon"] = rational_to(tunnel.epsilon);
  return out;
}

MonoidChain chain_from(const Json& j, const std::filesystem::path& base, const std::string& locus) {
  MonoidChain chain;
  const auto& monoids = require_array(require(j, "monoids", locus), field(locus, "monoids"));
  for (std::size_t i = 0; i < monoids.size(); ++i) {
    const auto loc = item(field(locus, "monoids"), i);
    chain.monoids.push_back(monoid_from(resolve(monoids[i], base, loc), loc));
  }
  const auto& eps = require_array(require(j, "epsilons", locus), field(locus, "epsilons"));
  for (std::size_t i = 0; i < eps.size(); ++i) {
    chain.epsilons.push_back(rational_from(eps[i], item(field(locus, "epsilons"), i)));
  }
  const auto& links = require_array(require(j, "links", locus), field(locus, "links"));
  if (links.size() + 1 != chain.monoids.size() || eps.size() != links.size()) {
    throw ParseError("a chain of n monoids needs n - 1 links and epsilons", locus);
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto loc = item(field(locus, "links"), i);
    Json link = links[i];
    if (link.is_object()) {
      if (!link.contains("epsilon")) link["epsilon"] = rational_to(chain.epsilons[i]);
      if (!link.contains("radius") && chain.epsilons[i] > 0) link["radius"] = rational_to(1 / chain.epsilons[i]);
    }
    chain.links.push_back(pair_from(link, chain.monoids[i], chain.monoids[i + 1], loc));
  }
  return chain;
}

Json chain_to(const MonoidChain& chain) {
  Json out;
  Json monoids = Json::array();
  for (const auto& g : chain.monoids) monoids.push_back(monoid_to(g));
  Json links = Json::array();
  for (std::size_t i = 0; i < chain.links.size(); ++i)
    links.push_back(pair_to(chain.links[i], chain.monoids[i], chain.monoids[i + 1]));
  Json eps = Json::array();
  for (const auto& e : chain.epsilons) eps.push_back(rational_to(e));
  out["monoids"] = monoids;
  out["links"] = links;
  out["epsilons"] = eps;
  return out;
}

Manifest manifest_from(const Json& j, const std::filesystem::path& base, const std::string& locus) {
  Manifest m;
  const auto sloc = field(locus, "systems");
  const auto& systems = require_array(require(j, "systems", locus), sloc);
  if (systems.empty()) throw ParseError("at least one system is required", sloc);
  for (std::size_t i = 0; i < systems.size(); ++i) {
    const auto loc = item(sloc, i);
    std::filesystem::path sub = base;
    if (systems[i].is_string()) sub = (base / systems[i].get<std::string>()).parent_path();
    m.systems.push_back(system_from(resolve(systems[i], base, loc), sub, loc));
  }
  if (j.contains("chain") && !j["chain"].is_null()) {
    const auto loc = field(locus, "chain");
    std::filesystem::path sub = base;
    if (j["chain"].is_string()) sub = (base / j["chain"].get<std::string>()).parent_path();
    m.chain = chain_from(resolve(j["chain"], base, loc), sub, loc);
  }
  const auto ploc = field(locus, "dilation_profile");
  const auto& profile = require_array(require(j, "dilation_profile", locus), ploc);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto loc = item(ploc, i);
    const auto& step = profile[i];
    if (step.is_array() && step.size() == 2) {
      m.profile.steps.emplace_back(rational_from(step[0], item(loc, 0)), rational_from(step[1], item(loc, 1)));
    } else {
      m.profile.steps.emplace_back(rational_from(require(step, "bound", loc), field(loc, "bound")),
                                   rational_from(require(step, "value", loc), field(loc, "value")));
    }
    if (i > 0 && m.profile.steps[i].first <= m.profile.steps[i - 1].first) {
      throw ParseError("step bounds must increase", loc);
    }
  }
  if (m.profile.steps.empty()) throw ParseError("at least one step is required", ploc);
  const auto mloc = field(locus, "modulus_schedule");
  const auto& schedule = require_array(require(j, "modulus_schedule", locus), mloc);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto loc = item(mloc, i);
    ModulusEntry e;
    e.epsilon = rational_from(require(schedule[i], "epsilon", loc), field(loc, "epsilon"));
    e.omega = rational_from(require(schedule[i], "omega", loc), field(loc, "omega"));
    if (schedule[i].contains("from")) e.from = index_from(schedule[i]["from"], field(loc, "from"));
    if (e.epsilon <= 0 || e.omega <= 0) throw ParseError("epsilon and omega must be positive", loc);
    m.schedule.push_back(e);
  }
  if (j.contains("budget")) m.budget = index_from(j["budget"], field(locus, "budget"));
  if (j.contains("tolerance")) m.tolerance = rational_from(j["tolerance"], field(locus, "tolerance"));
  return m;
}

FiniteMetricMonoid load_monoid(const std::filesystem::path& path) {
  return monoid_from(load_file(path), path.string());
}

FiniteQCMS load_space(const std::filesystem::path& path) { return space_from(load_file(path), path.string()); }

LipschitzDynamicalSystem load_system(const std::filesystem::path& path) {
  return system_from(load_file(path), path.parent_path(), path.string());
}

MonoidChain load_chain(const std::filesystem::path& path) {
  return chain_from(load_file(path), path.parent_path(), path.string());
}

}  // namespace covprop::io
