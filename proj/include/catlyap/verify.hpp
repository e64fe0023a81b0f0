#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "catlyap/cocycle.hpp"
#include "catlyap/potential.hpp"
#include "catlyap/torus.hpp"

namespace catlyap {

enum class Statement {
  thm_PLE,
  thm_plepd,
  thm_hple,
  prop_fPLE,
  lemma_lb,
  lemma_disc,
  remark_monotone,
  lemma_card,
  cor_bm,
  fubini,
  appendix_polar,
  log_cos_bound,
};

inline constexpr Statement kAllStatements[] = {
    Statement::thm_PLE,        Statement::thm_plepd,  Statement::thm_hple,
    Statement::prop_fPLE,      Statement::lemma_lb,   Statement::lemma_disc,
    Statement::remark_monotone, Statement::lemma_card, Statement::cor_bm,
    Statement::fubini,         Statement::appendix_polar, Statement::log_cos_bound,
};

std::string_view to_string(Statement s);
std::optional<Statement> statement_from_string(std::string_view name);

struct VerificationReport {
  Statement statement = Statement::thm_PLE;
  bool passed = false;
  std::map<std::string, double> measured_constants;
  std::vector<nlohmann::json> details;
  double runtime_seconds = 0.0;
  int skipped = 0;
  std::string reason;  // why it failed, empty on success
};

nlohmann::json to_json(const VerificationReport& r);

/// Every knob of the verification suites. Defaults are the desk-scale
/// acceptance settings.
struct VerifySettings {
  IntMatrix map = {2, 1, 1, 1};
  Potential potential = Potential::exponential().normalized();
  std::uint64_t seed = 20240601;

  // Phase-averaged exponent scans.
  std::vector<double> lambdas = {10.0, 100.0, 1000.0};
  std::vector<double> t_grid = default_t_grid();
  int n = 1000;
  int samples = 1000;
  double stability_tol = 0.5;
  /// Scaled energies outside [-1, 2] run directly on the raw cocycle.
  std::vector<double> spot_t = {-2.5, 3.5};
  std::vector<IntMatrix> hple_maps = {{2, 1, 1, 1}, {3, 1, 2, 1}};

  // Leaf-resolved statements.
  double leaf_lambda = 100.0;
  std::vector<double> leaf_t = {-1.0, 0.5, 2.0};
  int disc_z_count = 50;
  int disc_n_max = 12;
  int z_count = 20;
  int n_max = 10;
  int resolution = 1024;
  std::vector<double> deltas = {0.3, 0.1, 0.03, 0.01};
  double drift_tol = 0.2;
  int drift_from_n = 3;
  int lb_points = 100;
  double lb_t = 0.5;
  double floor_factor = 3.0;

  // Leaf-restricted exponents.
  std::vector<double> fple_z = {0.35355339059327373, 0.70710678118654746, 1.0606601717798212};
  std::vector<double> fple_t = {-1.0, -0.25, 0.5, 1.25, 2.0};
  int fple_samples = 300;
  int certificate_n = 6;

  double fubini_lambda = 100.0;
  double fubini_t = 0.5;
  int fubini_leaves = 32;
  int fubini_leaf_samples = 200;
  int fubini_torus_samples = 6400;

  int polar_samples = 10000;
  std::vector<double> polar_lambdas = {10.0, 20.0, 40.0, 80.0};
  double polar_tol = 1e-10;
  double slope_min = -2.5;
  double slope_max = -1.5;

  double logcos_lambda = 100.0;
  double logcos_t = 0.5;
  double logcos_z = 0.70710678118654746;
  int logcos_n = 10;
  int logcos_resolution = 256;
  double logcos_refine_tol = 1e-3;

  static std::vector<double> default_t_grid();
};

/// Evenly spaced grid with `count` points on [lo, hi].
std::vector<double> linspace(double lo, double hi, int count);

/// Pass/fail of the potential admissibility scan, recorded on every report.
struct Admissibility {
  bool admissible = false;
  double sup_norm = 0.0;
  double deriv_floor = 0.0;
  std::string reason;
};

Admissibility check_admissible(const Potential& v, const HyperbolicToralMap& map, int grid = 64);

/// Per-lambda constant C0(lambda) = max over t of (log lambda - L + 3 stderr).
struct DeficitScan {
  std::vector<double> lambdas;
  std::vector<double> c0;
  double spread = 0.0;  // max - min of c0
  std::vector<nlohmann::json> rows;
};

DeficitScan deficit_scan(const Potential& v, const HyperbolicToralMap& map,
                         const std::vector<double>& lambdas, const std::vector<double>& t_grid,
                         int n, int samples, std::uint64_t seed,
                         CocycleKind kind = CocycleKind::raw);

VerificationReport check_theorem_ple(const VerifySettings& s, bool with_spot_checks = true);
VerificationReport check_theorem_hple(const VerifySettings& s);
VerificationReport check_prop_fple(const VerifySettings& s);
VerificationReport check_lemma_lb(const VerifySettings& s);
VerificationReport check_lemma_disc(const VerifySettings& s);
VerificationReport check_remark_monotone(const VerifySettings& s);
VerificationReport check_lemma_card(const VerifySettings& s);
VerificationReport check_cor_bm(const VerifySettings& s);
VerificationReport check_fubini(const VerifySettings& s);
VerificationReport check_appendix_polar(const VerifySettings& s);
VerificationReport check_log_cos_bound(const VerifySettings& s);

VerificationReport run_statement(Statement st, const VerifySettings& s);

/// Guards against vacuous checks: a constant potential must be rejected and a
/// nearly constant one must open a C0 gap of at least `min_gap` nats.
struct NegativeControl {
  bool constant_rejected = false;
  double near_constant_floor = 0.0;
  double near_constant_c0 = 0.0;
  double reference_c0 = 0.0;
  double gap = 0.0;
  double min_gap = 1.0;
  bool passed = false;
  nlohmann::json details;
};

NegativeControl check_negative_control(const VerifySettings& s, double lambda = 10.0,
                                       double deriv_floor = 1e-6, double min_gap = 1.0);

}  // namespace catlyap
