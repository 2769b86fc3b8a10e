/*
 * SPDX-License-Identifier: Apache-2.0
 */
// covprop: command line front end for the covprop library.
//
// Exit codes: 0 success, 1 domain error (the error name is printed),
// 2 malformed input or usage.

#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "covprop/almost_iso.hpp"
#include "covprop/chain.hpp"
#include "covprop/errors.hpp"
#include "covprop/io.hpp"
#include "covprop/qcms.hpp"
#include "covprop/tunnels.hpp"
#include "covprop/upsilon.hpp"

namespace fs = std::filesystem;
using covprop::io::Json;

namespace {

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

Json witness_json(const std::vector<std::size_t>& w) {
  Json out = Json::array();
  for (auto v : w) out.push_back(v);
  return out;
}

std::string witness_text(const std::vector<std::size_t>& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s + ")";
}

Json stats_json(const covprop::SearchStats& s) {
  Json out;
  out["nodes"] = s.nodes;
  out["probes"] = s.probes;
  return out;
}

std::vector<covprop::Rational> parse_grid(const std::string& text) {
  std::vector<covprop::Rational> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(covprop::parse_rational(tok));
  }
  if (out.empty()) throw covprop::ParseError("empty grid", "--eta-grid");
  return out;
}

// Kernel files hold a matrix, or an object with a "kernel" field.
covprop::MarkovMap load_kernel(const fs::path& path, std::size_t rows, std::size_t cols) {
  Json j = covprop::io::load_file(path);
  if (j.is_object() && j.contains("kernel")) j = j["kernel"];
  return covprop::io::kernel_from(j, rows, cols, path.string());
}

struct Session {
  std::vector<std::string> argv;
  Json inputs = Json::array();
  Json result;
  std::string report_path;
  std::string witness_path;
  bool timing = false;

  fs::path input(const std::string& p) {
    Json entry;
    entry["path"] = p;
    entry["sha256"] = sha256_file(p);
    inputs.push_back(entry);
    return fs::path(p);
  }

  void emit_witness(const Json& w) const {
    if (!witness_path.empty()) covprop::io::save_file(witness_path, w);
  }
};

void print_alternatives(const covprop::AlmostIsoCheck& check) {
  if (check.ok) {
    std::cout << "true\n";
    return;
  }
  std::cout << "false\n";
  if (check.witness) {
    const auto& w = *check.witness;
    if (w.identity_failure) {
      std::cout << "witness: identity not preserved (orientation " << w.orientation << ")\n";
    } else {
      std::cout << "witness: orientation " << w.orientation << " g=" << w.g << " g'=" << w.g2 << " h=" << w.h
                << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  Session s;
  for (int i = 0; i < argc; ++i) s.argv.emplace_back(argv[i]);

  CLI::App app{"Exact metric computations on finite metric monoids and dynamical systems"};
  app.require_subcommand(1);
  std::size_t budget = 0;
  unsigned jobs = 1;
  std::string tolerance_text;
  app.add_option("--report", s.report_path, "write a JSON run report (schema v1)");
  app.add_option("--emit-witness", s.witness_path, "write the witness as JSON");
  app.add_option("--budget", budget, "element-count budget per monoid");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tolerance", tolerance_text, "tolerance p/q");
  app.add_flag("--timing", s.timing, "include wall time in the report");
  app.fallthrough();

  std::function<void()> action;
  std::string a, b, c, d;

  auto* validate = app.add_subcommand("validate", "validate a monoid, or check a pair between two monoids");
  std::string pair_path;
  validate->add_option("monoid", a, "monoid JSON")->required();
  validate->add_option("other", b, "second monoid JSON (with --pair)");
  validate->add_option("--pair", pair_path, "almost isometric pair JSON");
  validate->callback([&] {
    action = [&] {
      const auto g1 = covprop::io::load_monoid(s.input(a));
      if (pair_path.empty()) {
        std::cout << "valid\n";
        s.result["valid"] = true;
        s.result["elements"] = g1.size();
        s.result["group"] = g1.is_group();
        return;
      }
      if (b.empty()) throw covprop::ParseError("--pair needs a second monoid", "validate");
      const auto g2 = covprop::io::load_monoid(s.input(b));
      const auto pair = covprop::io::pair_from(covprop::io::load_file(s.input(pair_path)), g1, g2, pair_path);
      const auto check = covprop::check_almost_iso(g1, g2, pair);
      print_alternatives(check);
      s.result["certified"] = check.ok;
      if (check.witness) {
        const auto& w = *check.witness;
        s.result["witness"] = {{"orientation", w.orientation}, {"identity_failure", w.identity_failure},
                               {"g", w.g}, {"g2", w.g2}, {"h", w.h}};
      }
    };
  });

  bool star = false;
  auto add_upsilon = [&](const char* name, bool starred) {
    auto* sub = app.add_subcommand(name, starred ? "starred monoid distance" : "monoid Gromov-Hausdorff distance");
    sub->add_option("a", a)->required();
    sub->add_option("b", b)->required();
    if (!starred) sub->add_flag("--star", star, "starred variant");
    sub->callback([&, starred] {
      action = [&, starred] {
        const auto g1 = covprop::io::load_monoid(s.input(a));
        const auto g2 = covprop::io::load_monoid(s.input(b));
        covprop::UpsilonOptions opt;
        if (budget) opt.budget = budget;
        opt.jobs = jobs;
        const bool use_star = starred || star;
        const auto r = use_star ? covprop::upsilon_star(g1, g2, opt) : covprop::upsilon(g1, g2, opt);
        std::cout << r.value.str() << "\n";
        s.result["value"] = covprop::io::exact_to(r.value);
        s.result["star"] = use_star;
        s.result["attained"] = r.attained;
        s.result["isometric_isomorphism"] = r.isometric_isomorphism;
        Json probes = Json::array();
        for (std::size_t i = 0; i < r.criticals_tested.size(); ++i) {
          probes.push_back({{"epsilon", covprop::to_string(r.criticals_tested[i])}, {"feasible", bool(r.feasible[i])}});
        }
        s.result["probes"] = probes;
        s.result["stats"] = stats_json(r.stats);
        if (r.witness) {
          const auto w = covprop::io::pair_to(*r.witness, g1, g2);
          s.result["witness"] = w;
          s.emit_witness(w);
        }
      };
    });
  };
  add_upsilon("upsilon", false);
  add_upsilon("upsilon-star", true);

  auto* gh = app.add_subcommand("gh", "pointed Gromov-Hausdorff distance (half least distortion)");
  gh->add_option("a", a)->required();
  gh->add_option("b", b)->required();
  bool gh_local = false;
  gh->add_flag("--local", gh_local, "restrict to balls of radius 1/eps, capped at sqrt2/2");
  gh->callback([&] {
    action = [&] {
      const auto g1 = covprop::io::load_monoid(s.input(a));
      const auto g2 = covprop::io::load_monoid(s.input(b));
      const std::size_t limit = budget ? budget : 7;
      const std::string v = gh_local ? covprop::gh_pointed_local(g1, g2, limit).str()
                                     : covprop::to_string(covprop::gh_pointed(g1, g2, limit));
      std::cout << v << "\n";
      s.result["value"] = v;
      s.result["local"] = gh_local;
    };
  });

  auto* w1 = app.add_subcommand("w1", "Wasserstein-1 distance between two states");
  w1->add_option("space", a)->required();
  w1->add_option("mu", b)->required();
  w1->add_option("nu", c)->required();
  w1->callback([&] {
    action = [&] {
      const auto space = covprop::io::load_space(s.input(a));
      const auto mu = covprop::io::state_from(covprop::io::load_file(s.input(b)), space, b);
      const auto nu = covprop::io::state_from(covprop::io::load_file(s.input(c)), space, c);
      const auto plan = covprop::w1_plan(space, mu, nu);
      std::cout << covprop::to_string(plan.cost) << "\n";
      s.result["value"] = covprop::to_string(plan.cost);
      s.result["coupling"] = covprop::io::kernel_to(plan.flow);
      s.result["pivots"] = plan.pivots;
      s.emit_witness(covprop::io::kernel_to(plan.flow));
    };
  });

  std::string dst_path;
  auto* mkd = app.add_subcommand("mkd", "mkD distance between two Markov maps");
  mkd->add_option("space", a, "source space")->required();
  mkd->add_option("alpha", b)->required();
  mkd->add_option("beta", c)->required();
  mkd->add_option("--dst", dst_path, "destination space (default: the source space)");
  mkd->callback([&] {
    action = [&] {
      const auto src = covprop::io::load_space(s.input(a));
      const auto dst = dst_path.empty() ? src : covprop::io::load_space(s.input(dst_path));
      const auto alpha = load_kernel(s.input(b), dst.size(), src.size());
      const auto beta = load_kernel(s.input(c), dst.size(), src.size());
      const auto v = covprop::mk_dist_maps(src, dst, alpha, beta);
      std::cout << covprop::to_string(v) << "\n";
      s.result["value"] = covprop::to_string(v);
    };
  });

  auto* dil = app.add_subcommand("dil", "dilation of a Markov map");
  dil->add_option("space", a, "source space")->required();
  dil->add_option("alpha", b)->required();
  dil->add_option("--dst", dst_path, "destination space (default: the source space)");
  dil->callback([&] {
    action = [&] {
      const auto src = covprop::io::load_space(s.input(a));
      const auto dst = dst_path.empty() ? src : covprop::io::load_space(s.input(dst_path));
      const auto alpha = load_kernel(s.input(b), dst.size(), src.size());
      const auto v = covprop::dil_markov(src, dst, alpha);
      std::cout << covprop::to_string(v) << "\n";
      s.result["value"] = covprop::to_string(v);
    };
  });

  auto* vsys = app.add_subcommand("validate-system", "validate a Lipschitz dynamical system");
  vsys->add_option("system", a)->required();
  vsys->callback([&] {
    action = [&] {
      const auto sys = covprop::io::load_system(s.input(a));
      std::cout << "valid\n";
      Json table;
      covprop::Rational worst = 0;
      for (covprop::Element g = 0; g < sys.monoid.size(); ++g) {
        std::cout << sys.monoid.name(g) << ": " << covprop::to_string(sys.dilations[g]) << "\n";
        table[sys.monoid.name(g)] = covprop::to_string(sys.dilations[g]);
        worst = std::max<covprop::Rational>(worst, sys.dilations[g]);
      }
      s.result["dilations"] = table;
      s.result["max_dilation"] = covprop::to_string(worst);
    };
  });

  auto* induced = app.add_subcommand("induced-metric", "length metric induced by an isometric action");
  induced->add_option("system", a)->required();
  induced->callback([&] {
    action = [&] {
      const auto sys = covprop::io::load_system(s.input(a));
      const auto g = covprop::induced_length_metric(sys);
      const auto j = covprop::io::monoid_to(g);
      std::cout << j.dump(2) << "\n";
      s.result["monoid"] = j;
      s.emit_witness(j);
    };
  });

  auto add_tunnel_cmd = [&](const char* name, const char* help, int which) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("system1", a)->required();
    sub->add_option("system2", b)->required();
    sub->add_option("tunnel", c)->required();
    sub->callback([&, which] {
      action = [&, which] {
        const auto s1 = covprop::io::load_system(s.input(a));
        const auto s2 = covprop::io::load_system(s.input(b));
        const fs::path tp = s.input(c);
        const auto t = covprop::io::tunnel_from(covprop::io::load_file(tp), s1, s2, tp.parent_path(), tp.string());
        covprop::Rational v;
        if (which == 0) {
          v = covprop::extent(t);
        } else {
          const auto r = covprop::reach_report(s1, s2, t);
          s.result["reach"] = covprop::to_string(r.value);
          s.result["reach_orientation"] = r.orientation;
          s.result["reach_point"] = r.point;
          s.result["lps"] = r.lps;
          v = which == 1 ? r.value : std::max<covprop::Rational>(r.value, covprop::extent(t));
          if (which == 2) s.result["extent"] = covprop::to_string(covprop::extent(t));
        }
        std::cout << covprop::to_string(v) << "\n";
        s.result["value"] = covprop::to_string(v);
      };
    });
  };
  add_tunnel_cmd("extent", "extent of a covariant tunnel", 0);
  add_tunnel_cmd("reach", "reach of a covariant tunnel at its epsilon", 1);
  add_tunnel_cmd("magnitude", "magnitude of a covariant tunnel at its epsilon", 2);

  std::string eta_grid;
  auto* cov = app.add_subcommand("covprop-bound", "upper bound on the covariant propinquity");
  cov->add_option("system1", a)->required();
  cov->add_option("system2", b)->required();
  cov->add_option("--eta-grid", eta_grid, "comma separated bridge tolls, e.g. 1/2,1/4");
  cov->callback([&] {
    action = [&] {
      const auto s1 = covprop::io::load_system(s.input(a));
      const auto s2 = covprop::io::load_system(s.input(b));
      covprop::CovpropOptions opt;
      if (budget) opt.budget = budget;
      opt.jobs = jobs;
      if (!eta_grid.empty()) opt.eta_grid = parse_grid(eta_grid);
      const auto r = covprop::covprop_upper_bound(s1, s2, opt);
      std::cout << r.value.str() << "\n";
      s.result["value"] = covprop::io::exact_to(r.value);
      s.result["attained"] = r.attained;
      s.result["equivariant_isomorphism"] = r.equivariant_isomorphism;
      s.result["stats"] = {{"geometries", r.geometries}, {"tunnels", r.tunnels_evaluated}, {"lps", r.lps},
                           {"nodes", r.search.nodes}, {"probes", r.search.probes}};
      if (r.witness) {
        const auto w = covprop::io::tunnel_to(*r.witness, s1, s2);
        s.result["witness"] = w;
        s.emit_witness(w);
      }
    };
  });

  auto* cverify = app.add_subcommand("chain-verify", "verify every link of a monoid chain");
  cverify->add_option("chain", a)->required();
  cverify->callback([&] {
    action = [&] {
      const auto chain = covprop::io::load_chain(s.input(a));
      covprop::validate_chain(chain);
      std::cout << "valid\n";
      Json sums = Json::array();
      for (std::size_t n = 0; n < chain.monoids.size(); ++n) {
        sums.push_back(covprop::to_string(covprop::epsilon_sum(chain, n, chain.monoids.size() - 1)));
      }
      s.result["valid"] = true;
      s.result["links"] = chain.links.size();
      s.result["tail_sums"] = sums;
    };
  });

  std::size_t n_index = 0;
  std::size_t m_index = 0;
  auto* cbound = app.add_subcommand("chain-bound", "Cauchy bound between two chain indices");
  cbound->add_option("chain", a)->required();
  cbound->add_option("n", n_index)->required();
  cbound->add_option("m", m_index)->required();
  cbound->callback([&] {
    action = [&] {
      const auto chain = covprop::io::load_chain(s.input(a));
      covprop::validate_chain(chain);
      const auto r = covprop::cauchy_bound(chain, n_index, m_index);
      std::cout << r.value.str() << "\n";
      s.result["value"] = covprop::io::exact_to(r.value);
      s.result["epsilon_sum"] = covprop::to_string(r.epsilon_sum);
      if (r.witness) {
        const auto w = covprop::io::pair_to(*r.witness, chain.monoids[n_index], chain.monoids[m_index]);
        s.result["witness"] = w;
        s.emit_witness(w);
      }
    };
  });

  std::string element;
  std::string eps_text;
  auto* regular = app.add_subcommand("regular-check", "regularity certificate for a lifted element");
  regular->add_option("chain", a)->required();
  regular->add_option("N", n_index)->required();
  regular->add_option("element", element)->required();
  regular->add_option("epsilon", eps_text)->required();
  regular->callback([&] {
    action = [&] {
      const auto chain = covprop::io::load_chain(s.input(a));
      covprop::validate_chain(chain);
      const auto eps = covprop::parse_rational(eps_text);
      if (eps <= 0) throw covprop::ParseError("epsilon must be positive", "epsilon");
      if (n_index >= chain.monoids.size()) throw covprop::ParseError("index beyond the chain", "N");
      const auto g = chain.monoids[n_index].index_of(element);
      const auto cert = covprop::check_regular(chain, n_index, g, eps);
      Json seq = Json::array();
      for (std::size_t n = 0; n < cert.sequence.size(); ++n) seq.push_back(chain.monoids[n].name(cert.sequence[n]));
      s.result["sequence"] = seq;
      Json per = Json::array();
      for (const auto& e : cert.per_start) {
        if (e) {
          per.push_back({{"start", e->start}, {"omega", covprop::to_string(e->omega)},
                         {"verified_through", e->verified_through}});
        } else {
          per.push_back(nullptr);
        }
      }
      s.result["per_start"] = per;
      if (cert.best) {
        std::cout << "omega " << covprop::to_string(cert.best->omega) << " from " << cert.best->start
                  << " verified through " << cert.best->verified_through << "\n";
        s.result["omega"] = covprop::to_string(cert.best->omega);
        s.result["start"] = cert.best->start;
        s.result["verified_through"] = cert.best->verified_through;
      } else {
        std::cout << "none\n";
        s.result["omega"] = nullptr;
      }
    };
  });

  auto* limit = app.add_subcommand("limit-experiment", "check convergence hypotheses and report bounds");
  limit->add_option("manifest", a)->required();
  limit->callback([&] {
    action = [&] {
      const fs::path mp = s.input(a);
      const auto m = covprop::io::manifest_from(covprop::io::load_file(mp), mp.parent_path(), mp.string());
      covprop::LimitExperimentOptions opt;
      if (m.budget) opt.budget = *m.budget;
      if (budget) opt.budget = budget;
      if (m.tolerance) opt.tolerance = *m.tolerance;
      if (!tolerance_text.empty()) opt.tolerance = covprop::parse_rational(tolerance_text);
      opt.covprop.jobs = jobs;
      const auto r = covprop::limit_experiment(m.systems, m.chain, m.profile, m.schedule, opt);
      Json bounds = Json::array();
      Json ups = Json::array();
      Json spaces = Json::array();
      for (std::size_t n = 0; n < r.bounds.size(); ++n) {
        std::cout << n << " " << r.bounds[n].value.str() << "\n";
        bounds.push_back(covprop::io::exact_to(r.bounds[n].value));
        ups.push_back(covprop::io::exact_to(r.upsilon_to_proxy[n]));
        spaces.push_back(covprop::to_string(r.space_to_proxy[n]));
      }
      std::cout << "hypotheses: pass\n";
      std::cout << "non-increasing: " << (r.non_increasing ? "yes" : "no") << "\n";
      std::cout << "below tolerance: " << (r.below_tolerance ? "yes" : "no") << "\n";
      s.result["proxy"] = r.proxy;
      s.result["hypotheses"] = {{"1", true}, {"2", true}, {"3", true}, {"4", true}};
      s.result["upsilon_to_proxy"] = ups;
      s.result["space_to_proxy"] = spaces;
      s.result["bounds"] = bounds;
      s.result["non_increasing"] = r.non_increasing;
      s.result["below_tolerance"] = r.below_tolerance;
      s.result["tolerance"] = covprop::to_string(opt.tolerance);
      s.result["chain_verified"] = r.chain_verified;
      s.result["horizon"] = "verified through index " + std::to_string(r.proxy);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (app.get_subcommands().empty() && argc > 1) {
      std::cout << "UnknownSubcommand\n";
      std::cerr << "no such subcommand; run with --help for the list\n";
      return 2;
    }
    app.exit(e);
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (!tolerance_text.empty()) covprop::parse_rational(tolerance_text);
    action();
  } catch (const covprop::DomainError& e) {
    std::cout << e.name() << "\n";
    if (!e.witness().empty()) std::cout << "witness " << witness_text(e.witness()) << "\n";
    std::cerr << e.what() << "\n";
    s.result["error"] = e.name();
    s.result["message"] = e.what();
    s.result["witness"] = witness_json(e.witness());
    code = 1;
  } catch (const covprop::ParseError& e) {
    std::cout << "ParseError\n";
    std::cerr << e.what() << "\n";
    s.result["error"] = "ParseError";
    s.result["message"] = e.what();
    code = 2;
  }

  if (!s.report_path.empty()) {
    Json report;
    report["schema"] = "v1";
    Json cmd = Json::array();
    for (std::size_t i = 1; i < s.argv.size(); ++i) cmd.push_back(s.argv[i]);
    report["command"] = cmd;
    report["inputs"] = s.inputs;
    report["result"] = s.result;
    report["exit_code"] = code;
    if (s.timing) {
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
      report["wall_time_ms"] = ms.count();
    }
    try {
      covprop::io::save_file(s.report_path, report);
    } catch (const covprop::ParseError& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
  }
  return code;
}
