#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "catlyap/config.hpp"
#include "catlyap/verify.hpp"

namespace catlyap {

/// Artifact version string.
const char* version();

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
};

Provenance provenance_of(const RunConfig& cfg);
nlohmann::json to_json(const Provenance& p);

/// 17 significant digits: round-trips every double.
std::string format_double(double x);

struct ScanRow {
  double lambda = 0.0;
  double t = 0.0;
  double energy = 0.0;
  int n = 0;
  int samples = 0;
  Estimator estimator = Estimator::vector_iteration;
  double L = 0.0;
  double std_error = 0.0;
  double log_lambda = 0.0;
  double deficit = 0.0;
};

/// estimate_torus over the lambda x t grid, lambda-major.
std::vector<ScanRow> run_scan(const RunConfig& cfg);
void write_scan(const std::vector<ScanRow>& rows, const Provenance& prov, OutputFormat format,
                std::ostream& out);

struct CensusRow {
  double z = 0.0;
  int n = 0;
  int crossings = 0;
  double disc_bound = 0.0;
  bool skipped = false;
  std::string skip_reason;
  int critical = 0;
  double critical_bound = 0.0;
  double badset_delta = 0.0;
  double badset_measure = 0.0;
};

/// One row per (z, n) with n = 0..census.n_max.
std::vector<CensusRow> run_leaf_census(const RunConfig& cfg);
void write_census(const std::vector<CensusRow>& rows, const Provenance& prov, OutputFormat format,
                  std::ostream& out);

/// JSON array of reports, each carrying the provenance field.
nlohmann::json reports_json(const std::vector<VerificationReport>& reports,
                            const Provenance& prov);

}  // namespace catlyap
