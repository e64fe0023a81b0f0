#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "catlyap/cocycle.hpp"
#include "catlyap/lyapunov.hpp"
#include "catlyap/potential.hpp"
#include "catlyap/torus.hpp"
#include "catlyap/verify.hpp"

namespace catlyap {

enum class OutputFormat { csv, json };

/// Leaf census knobs (leaf-census subcommand).
struct CensusConfig {
  double lambda = 100.0;
  double t = 0.5;
  int n_max = 10;
  double delta = 0.1;
  int resolution = 1024;
};

/// One archival run description. Loaded from a single JSON document; CLI
/// flags override individual fields afterwards.
struct RunConfig {
  IntMatrix map = {2, 1, 1, 1};
  nlohmann::json potential_block = {{"family", "exponential"}, {"normalize", true}};
  std::vector<double> lambdas = {10.0, 100.0, 1000.0};
  std::vector<double> t_grid = VerifySettings::default_t_grid();
  int n = 1000;
  int samples = 1000;
  std::uint64_t seed = 20240601;
  std::vector<double> z_grid;
  std::string output = "-";
  OutputFormat format = OutputFormat::csv;
  Estimator estimator = Estimator::vector_iteration;
  CocycleKind kind = CocycleKind::raw;
  int warmup = 0;
  CensusConfig census;
  nlohmann::json verify_block = nlohmann::json::object();

  RunConfig();

  HyperbolicToralMap toral_map() const;
  Potential potential() const;
  VerifySettings verify_settings() const;
  /// Effective configuration, used for hashing and provenance.
  nlohmann::json to_json() const;
  /// Re-checks every field; throws ConfigError naming the field.
  void validate(const std::string& origin = "config") const;
};

/// Parses a config document. Missing fields keep their defaults; unknown
/// fields and type mismatches raise ConfigError with the field path (and
/// line/column for syntax errors). `origin` names the source in messages.
RunConfig config_from_json(const nlohmann::json& doc, const std::string& origin = "config");
RunConfig parse_config(const std::string& text, const std::string& origin = "config");
/// Throws IoError if the file cannot be read.
RunConfig load_config(const std::string& path);

/// Builds a potential from its JSON block.
Potential potential_from_json(const nlohmann::json& block, const std::string& field = "potential",
                              const std::string& origin = "config");

/// 64-bit FNV-1a of the canonical JSON dump (output path excluded), as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace catlyap
