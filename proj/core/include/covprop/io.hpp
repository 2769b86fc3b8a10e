/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "covprop/almost_iso.hpp"
#include "covprop/chain.hpp"
#include "covprop/monoid.hpp"
#include "covprop/qcms.hpp"
#include "covprop/tunnels.hpp"

/// JSON instance formats. Rationals are written as "p/q" strings; on input
/// integers and "p" strings are accepted too. Element and point references
/// may be names (strings) or indices. Nested instances may be given inline
/// or as a path relative to the referring file. Every malformed input
/// throws ParseError with the offending file/field as locus.
namespace covprop::io {

using Json = nlohmann::ordered_json;

Json load_file(const std::filesystem::path& path);
void save_file(const std::filesystem::path& path, const Json& value);

Rational rational_from(const Json& j, const std::string& locus);
Json rational_to(const Rational& value);
Json exact_to(const ExactReal& value);

MonoidTable monoid_table_from(const Json& j, const std::string& locus);
/// Parses and validates; axiom failures propagate as MonoidAxiomError.
FiniteMetricMonoid monoid_from(const Json& j, const std::string& locus);
Json monoid_to(const FiniteMetricMonoid& g);

AlmostIsoPair pair_from(const Json& j, const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2,
                        const std::string& locus);
Json pair_to(const AlmostIsoPair& pair, const FiniteMetricMonoid& g1, const FiniteMetricMonoid& g2);

FiniteQCMS space_from(const Json& j, const std::string& locus);
Json space_to(const FiniteQCMS& space);

/// A list of weights, or an object with "weights". Validated against the space.
State state_from(const Json& j, const FiniteQCMS& space, const std::string& locus);
Json state_to(const State& state);

MarkovMap kernel_from(const Json& j, std::size_t rows, std::size_t cols, const std::string& locus);
Json kernel_to(const MarkovMap& kernel);

/// Resolves an inline object or a path string relative to `base`.
Json resolve(const Json& j, const std::filesystem::path& base, const std::string& locus);

LipschitzDynamicalSystem system_from(const Json& j, const std::filesystem::path& base, const std::string& locus);
Json system_to(const LipschitzDynamicalSystem& sys);

CovariantTunnel tunnel_from(const Json& j, const LipschitzDynamicalSystem& sys1, const LipschitzDynamicalSystem& sys2,
                            const std::filesystem::path& base, const std::string& locus);
Json tunnel_to(const CovariantTunnel& tunnel, const LipschitzDynamicalSystem& sys1,
               const LipschitzDynamicalSystem& sys2);

MonoidChain chain_from(const Json& j, const std::filesystem::path& base, const std::string& locus);
Json chain_to(const MonoidChain& chain);

struct Manifest {
  std::vector<LipschitzDynamicalSystem> systems;
  std::optional<MonoidChain> chain;
  DilationProfile profile;
  std::vector<ModulusEntry> schedule;
  std::optional<std::size_t> budget;
  std::optional<Rational> tolerance;
};

Manifest manifest_from(const Json& j, const std::filesystem::path& base, const std::string& locus);

/// Convenience loaders: read the file and parse with the file name as locus.
FiniteMetricMonoid load_monoid(const std::filesystem::path& path);
FiniteQCMS load_space(const std::filesystem::path& path);
LipschitzDynamicalSystem load_system(const std::filesystem::path& path);
MonoidChain load_chain(const std::filesystem::path& path);

}  // namespace covprop::io
