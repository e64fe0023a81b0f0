#include "catlyap/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "catlyap/angle.hpp"
#include "catlyap/errors.hpp"
#include "catlyap/leaves.hpp"
#include "catlyap/lyapunov.hpp"
#include "catlyap/parallel.hpp"

namespace catlyap {

using nlohmann::json;

namespace {

constexpr const char* kNames[] = {
    "thm_PLE",         "thm_plepd",  "thm_hple", "prop_fPLE", "lemma_lb", "lemma_disc",
    "remark_monotone", "lemma_card", "cor_bm",   "fubini",    "appendix_polar",
    "log_cos_bound",
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

HyperbolicToralMap make_map(const IntMatrix& m) { return HyperbolicToralMap::make(m[0], m[1], m[2], m[3]); }

// Adds the admissibility row; returns false (and sets the reason) when rejected.
bool record_admissibility(VerificationReport& r, const Potential& v,
                          const HyperbolicToralMap& map) {
  const Admissibility adm = check_admissible(v, map);
  r.measured_constants["deriv_floor"] = adm.deriv_floor;
  r.measured_constants["sup_norm"] = adm.sup_norm;
  r.details.push_back({{"case", "admissibility"},
                       {"admissible", adm.admissible},
                       {"deriv_floor", adm.deriv_floor},
                       {"sup_norm", adm.sup_norm},
                       {"reason", adm.reason}});
  if (!adm.admissible) r.reason = "potential not admissible: " + adm.reason;
  return adm.admissible;
}

// Skips force failure; counted separately so the reason is visible.
void finish(VerificationReport& r, bool ok, const std::string& why, const Stopwatch& clock) {
  r.passed = ok && r.skipped == 0 && r.reason.empty();
  if (!r.passed && r.reason.empty()) {
    r.reason = r.skipped > 0 ? std::to_string(r.skipped) + " case(s) skipped" : why;
  }
  r.runtime_seconds = clock.seconds();
}

double leaf_z(int i, int count) { return (i + 0.5) * kSqrt2 / count; }

AngleKernel leaf_kernel(const Potential& v, double lambda, double t) {
  return AngleKernel{v, CocycleParams::scaled(lambda, t)};
}

}  // namespace

std::string_view to_string(Statement s) { return kNames[static_cast<int>(s)]; }

std::optional<Statement> statement_from_string(std::string_view name) {
  for (Statement s : kAllStatements) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

json to_json(const VerificationReport& r) {
  json out;
  out["statement"] = std::string(to_string(r.statement));
  out["passed"] = r.passed;
  json consts = json::object();
  for (const auto& [k, v] : r.measured_constants) {
    consts[k] = std::isfinite(v) ? json(v) : json(nullptr);
  }
  out["measured_constants"] = consts;
  out["details"] = r.details;
  out["runtime_seconds"] = r.runtime_seconds;
  out["skipped"] = r.skipped;
  if (!r.reason.empty()) out["reason"] = r.reason;
  return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1) return {lo};
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  return out;
}

std::vector<double> VerifySettings::default_t_grid() { return linspace(-1.0, 2.0, 61); }

Admissibility check_admissible(const Potential& v, const HyperbolicToralMap& map, int grid) {
  Admissibility a;
  try {
    const PotentialCertificate c = certify(v, map, grid);
    a.sup_norm = c.sup_norm_measured;
    a.deriv_floor = c.deriv_floor_measured;
    if (c.sup_norm_measured > 1.0 + 1e-12) {
      a.reason = "sup norm exceeds 1";
    } else {
      a.admissible = true;
    }
  } catch (const NotMonotoneAlongUnstable& e) {
    a.reason = e.what();
  }
  return a;
}

DeficitScan deficit_scan(const Potential& v, const HyperbolicToralMap& map,
                         const std::vector<double>& lambdas, const std::vector<double>& t_grid,
                         int n, int samples, std::uint64_t seed, CocycleKind kind) {
  DeficitScan scan;
  scan.lambdas = lambdas;
  const std::size_t nt = t_grid.size();
  std::vector<LyapunovEstimate> est(lambdas.size() * nt);
  for (std::size_t i = 0; i < est.size(); ++i) {
    EstimateOptions opt;
    opt.n = n;
    opt.samples = samples;
    opt.seed = seed;
    opt.kind = kind;
    est[i] = estimate_torus(v, CocycleParams::scaled(lambdas[i / nt], t_grid[i % nt]), map, opt);
  }
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    const double loglam = std::log(lambdas[li]);
    double c0 = -std::numeric_limits<double>::infinity();
    for (std::size_t ti = 0; ti < nt; ++ti) {
      const LyapunovEstimate& e = est[li * nt + ti];
      const double deficit = loglam - e.value;
      c0 = std::max(c0, deficit + 3.0 * e.std_error);
      scan.rows.push_back({{"lambda", lambdas[li]},
                           {"t", t_grid[ti]},
                           {"L", e.value},
                           {"stderr", e.std_error},
                           {"deficit", deficit}});
    }
    scan.c0.push_back(c0);
  }
  if (!scan.c0.empty()) {
    const auto [lo, hi] = std::minmax_element(scan.c0.begin(), scan.c0.end());
    scan.spread = *hi - *lo;
  }
  return scan;
}

// ---------------------------------------------------------------------------
// Phase-averaged statements

VerificationReport check_theorem_ple(const VerifySettings& s, bool with_spot_checks) {
  Stopwatch clock;
  VerificationReport r;
  r.statement = with_spot_checks ? Statement::thm_PLE : Statement::thm_plepd;
  const HyperbolicToralMap map = make_map(s.map);
  record_admissibility(r, s.potential, map);

  const DeficitScan scan =
      deficit_scan(s.potential, map, s.lambdas, s.t_grid, s.n, s.samples, s.seed);
  r.details.insert(r.details.end(), scan.rows.begin(), scan.rows.end());
  bool ok = scan.c0.size() >= 2;
  double c0max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scan.c0.size(); ++i) {
    r.measured_constants["C0_lambda_" + std::to_string(static_cast<long long>(s.lambdas[i]))] =
        scan.c0[i];
    ok = ok && std::isfinite(scan.c0[i]);
    c0max = std::max(c0max, scan.c0[i]);
  }
  r.measured_constants["C0"] = c0max;
  r.measured_constants["C0_spread"] = scan.spread;
  ok = ok && scan.spread <= s.stability_tol;
  std::string why = "C0 spread " + std::to_string(scan.spread) + " exceeds " +
                    std::to_string(s.stability_tol);

  if (with_spot_checks) {
    for (std::size_t li = 0; li < s.lambdas.size(); ++li) {
      for (double t : s.spot_t) {
        const double lambda = s.lambdas[li];
        EstimateOptions opt;
        opt.n = s.n;
        opt.samples = s.samples;
        opt.seed = s.seed;
        const LyapunovEstimate e =
            estimate_torus(s.potential, CocycleParams::from_energy(lambda, lambda * t), map, opt);
        const double margin = e.value - (std::log(lambda) - scan.c0[li]) + 3.0 * e.std_error;
        r.details.push_back({{"case", "spot"},
                             {"lambda", lambda},
                             {"t", t},
                             {"energy", lambda * t},
                             {"L", e.value},
                             {"stderr", e.std_error},
                             {"margin", margin}});
        if (!(margin >= 0.0)) {
          ok = false;
          why = "energy outside the scaled interval falls below log lambda - C0";
        }
      }
    }
  }
  finish(r, ok, why, clock);
  return r;
}

VerificationReport check_theorem_hple(const VerifySettings& s) {
  Stopwatch clock;
  VerificationReport r;
  r.statement = Statement::thm_hple;
  bool ok = !s.hple_maps.empty();
  std::string why = "no maps requested";
  for (std::size_t i = 0; i < s.hple_maps.size(); ++i) {
    VerifySettings sub = s;
    sub.map = s.hple_maps[i];
    const VerificationReport one = check_theorem_ple(sub, true);
    const auto& m = s.hple_maps[i];
    const std::string tag = "[" + std::to_string(m[0]) + "," + std::to_string(m[1]) + ";" +
                            std::to_string(m[2]) + "," + std::to_string(m[3]) + "]";
    r.measured_constants["C0_" + tag] = one.measured_constants.at("C0");
    r.measured_constants["C0_spread_" + tag] = one.measured_constants.at("C0_spread");
    r.details.push_back({{"map", tag},
                         {"expansion", make_map(m).expansion()},
                         {"passed", one.passed},
                         {"reason", one.reason},
                         {"report", to_json(one)}});
    r.skipped += one.skipped;
    if (!one.passed) {
      ok = false;
      why = tag + ": " + one.reason;
    }
  }
  finish(r, ok, why, clock);
  return r;
}

VerificationReport check_prop_fple(const VerifySettings& s) {
  Stopwatch clock;
  VerificationReport r;
  r.statement = Statement::prop_fPLE;
  const HyperbolicToralMap map = make_map(s.map);
  record_admissibility(r, s.potential, map);

  bool ok = s.lambdas.size() >= 2;
  std::string why;
  std::vector<double> c0(s.lambdas.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t li = 0; li < s.lambdas.size(); ++li) {
    for (double z : s.fple_z) {
      for (double t : s.fple_t) {
        EstimateOptions opt;
        opt.n = s.n;
        opt.samples = s.fple_samples;
        opt.seed = s.seed;
        const double lambda = s.lambdas[li];
        const LyapunovEstimate e =
            estimate_leaf(s.potential, CocycleParams::scaled(lambda, t), map, z, opt);
        const double deficit = std::log(lambda) - e.value;
        c0[li] = std::max(c0[li], deficit + 3.0 * e.std_error);
        r.details.push_back({{"case", "leaf_exponent"},
                             {"lambda", lambda},
                             {"z", z},
                             {"t", t},
                             {"L", e.value},
                             {"stderr", e.std_error},
                             {"deficit", deficit}});
      }
    }
  }
  for (std::size_t li = 0; li < c0.size(); ++li) {
    r.measured_constants["C0_leaf_lambda_" +
                         std::to_string(static_cast<long long>(s.lambdas[li]))] = c0[li];
    ok = ok && std::isfinite(c0[li]);
  }
  double spread = 0.0;
  if (!c0.empty()) spread = *std::max_element(c0.begin(), c0.end()) - *std::min_element(c0.begin(), c0.end());
  r.measured_constants["C0_leaf_spread"] = spread;
  if (!(spread <= s.stability_tol)) {
    ok = false;
    why = "leaf C0 spread " + std::to_string(spread) + " exceeds " + std::to_string(s.stability_tol);
  }

  // The quadrature certificate is a lower bound for the reduced cocycle's exponent.
  const CocycleParams params = CocycleParams::scaled(s.leaf_lambda, s.lb_t);
  double worst = std::numeric_limits<double>::infinity();
  for (double z : s.fple_z) {
    try {
      const LowerBoundCertificate cert =
          lower_bound_certificate(s.potential, params, map, z, s.certificate_n, s.resolution);
      EstimateOptions opt;
      opt.n = s.n;
      opt.samples = s.fple_samples;
      opt.seed = s.seed;
      opt.kind = CocycleKind::reduced;
      const LyapunovEstimate e = estimate_leaf(s.potential, params, map, z, opt);
      const double margin = e.value + 3.0 * e.std_error - cert.value;
      worst = std::min(worst, margin);
      r.details.push_back({{"case", "certificate"},
                           {"z", z},
                           {"lambda", s.leaf_lambda},
                           {"t", s.lb_t},
                           {"certificate", cert.value},
                           {"L_reduced", e.value},
                           {"stderr", e.std_error},
                           {"margin", margin}});
      if (!(margin >= 0.0)) {
        ok = false;
        why = "certificate exceeds the leaf exponent";
      }
    } catch (const ResolutionExhausted& e) {
      ++r.skipped;
      r.details.push_back({{"case", "certificate"}, {"z", z}, {"skipped", e.what()}});
    }
  }
  r.measured_constants["certificate_margin_min"] = worst;
  finish(r, ok, why, clock);
  return r;
}

VerificationReport check_fubini(const VerifySettings& s) {
  Stopwatch clock;
  VerificationReport r;
  r.statement = Statement::fubini;
  const HyperbolicToralMap map = make_map(s.map);
  const CocycleParams params = CocycleParams::scaled(s.fubini_lambda, s.fubini_t);

  std::vector<double> weighted(static_cast<std::size_t>(s.fubini_leaves));
  std::vector<double> var(weighted.size());
  std::vector<double> lengths(weighted.size());
  for (int i = 0; i < s.fubini_leaves; ++i) {
    const double z = leaf_z(i, s.fubini_leaves);
    EstimateOptions opt;
    opt.n = s.n;
    opt.samples = s.fubini_leaf_samples;
    opt.seed = s.seed + 7919u * static_cast<std::uint64_t>(i + 1);
    const LyapunovEstimate e = estimate_leaf(s.potential, params, map, z, opt);
    const double len = leaf_from_z(map, z).length;
    const auto k = static_cast<std::size_t>(i);
    lengths[k] = len;
    weighted[k] = len * e.value;
    var[k] = len * len * e.std_error * e.std_error;
    r.details.push_back({{"case", "leaf"},
                         {"z", z},
                         {"length", len},
                         {"L", e.value},
                         {"stderr", e.std_error}});
  }
  const double total_len = pairwise_sum(lengths);
  const double leaf_avg = pairwise_sum(weighted) / total_len;
  const double leaf_se = std::sqrt(pairwise_sum(var)) / total_len;

  EstimateOptions opt;
  opt.n = s.n;
  opt.samples = s.fubini_torus_samples;
  opt.seed = s.seed;
  const LyapunovEstimate torus = estimate_torus(s.potential, params, map, opt);
  const double combined = std::sqrt(leaf_se * leaf_se + torus.std_error * torus.std_error);
  const double diff = leaf_avg - torus.value;
  r.measured_constants["leaf_average"] = leaf_avg;
  r.measured_constants["leaf_stderr"] = leaf_se;
  r.measured_constants["torus"] = torus.value;
  r.measured_constants["torus_stderr"] = torus.std_error;
  r.measured_constants["difference"] = diff;
  r.measured_constants["z_score"] = diff / combined;
  r.details.push_back({{"case", "torus"}, {"L", torus.value}, {"stderr", torus.std_error}});
  finish(r, std::abs(diff) <= 3.0 * combined,
         "leaf average differs from the torus estimate by more than 3 combined stderr", clock);
  return r;
}

// ---------------------------------------------------------------------------
// Leaf-resolved statements

VerificationReport check_lemma_disc(const VerifySettings& s) {
  Stopwatch clock;
  VerificationReport r;
  r.statement = Statement::lemma_disc;
  const HyperbolicToralMap map = make_map(s.map);
  const double alpha = map.expansion();
  int violations = 0;
  double worst = 0.0;
  for (int i = 0; i < s.disc_z_count; ++i) {
    const Leaf leaf = leaf_from_z(map, leaf_z(i, s.disc_z_count));
    for (int n = 0; n <= s.disc_n_max; ++n) {
      const CrossingCensus c = image_crossings(map, leaf, n);
      const double bound = std::pow(alpha, n + 2);
      worst = std::max(worst, c.count / bound);
      if (!(c.count < bound)) ++violations;
      r.details.push_back({{"z", leaf.z}, {"n", n}, {"crossings", c.count}, {"bound", bound}});
    }
  }
  r.measured_constants["ratio_max"] = worst;
  r.measured_constants["violations"] = violations;
  finish(r, violations == 0, std::to_string(violations) + " crossing count(s) at or above the bound",
         clock);
  return r;
}

namespace {

struct LeafCase {
  double t = 0.0;
  double z = 0.0;
  int n = 0;
  bool skipped = false;
  std::string skip_reason;
  int critical = 0;
  int pieces = 0;
  int steep = 0;
  double worst_decrease = 0.0;
};

std::vector<LeafCase> run_leaf_cases(const VerifySettings& s, const HyperbolicToralMap& map) {
  std::vector<LeafCase> cases;
  for (double t : s.leaf_t) {
    for (int i = 0; i < s.z_count; ++i) {
      for (int n = 0; n <= s.n_max; ++n) {
        LeafCase c;
        c.t = t;
        c.z = leaf_z(i, s.z_count);
        c.n = n;
        cases.push_back(c);
      }
    }
  }
  parallel_for(cases.size(), [&](std::size_t k) {
    LeafCase& c = cases[k];
    try {
      const LeafAngleField field(leaf_kernel(s.potential, s.leaf_lambda, c.t), map,
                                 leaf_from_z(map, c.z), c.n);
      const AngleOrbit orbit = orbit_along_leaf(field, s.resolution);
      c.critical = critical_census(orbit);
      c.pieces = static_cast<int>(orbit.pieces.size());
      c.steep = orbit.steep_pairs;
      c.worst_decrease = orbit.worst_decrease();
    } catch (const ResolutionExhausted& e) {
      c.skipped = true;
      c.skip_reason = e.what();
    }
  });
  return cases;
}

}  // namespace

VerificationReport check_remark_monotone(const VerifySettings& s) {
  Stopwatch clock;
  VerificationReport r;
  r.statement = Statement::remark_monotone;
  const HyperbolicToralMap map = make_map(s.map);
  record_admissibility(r, s.potential, map);
  constexpr double kTol = 1e-9;
  int violations = 0;
  int steep = 0;
  double worst = 0.0;
  for (const LeafCase& c : run_leaf_cases(s, map)) {
    if (c.skipped) {
      ++r.skipped;
      r.details.push_back({{"t", c.t}, {"z", c.z}, {"n", c.n}, {"skipped", c.skip_reason}});
      continue;
    }
    worst = std::max(worst, c.worst_decrease);
    steep += c.steep;
    if (c.worst_decrease > kTol) ++violations;
    r.details.push_back({{"t", c.t},
                         {"z", c.z},
                         {"n", c.n},
                         {"pieces", c.pieces},
                         {"worst_decrease", c.worst_decrease},
                         {"steep_pairs", c.steep}});
  }
  r.measured_constants["worst_decrease"] = worst;
  r.measured_constants["violations"] = violations;
  r.measured_constants["steep_pairs"] = steep;
  finish(r, violations == 0, std::to_string(violations) + " piece(s) with a decreasing lift",
         clock);
  return r;
}

VerificationReport check_lemma_card(const VerifySettings& s) {
  Stopwatch clock;
  VerificationReport r;
  r.statement = Statement::lemma_card;
  const HyperbolicToralMap map = make_map(s.map);
  record_admissibility(r, s.potential, map);
  const double alpha = map.expansion();
  int violations = 0;
  double worst = 0.0;
  for (const LeafCase& c : run_leaf_cases(s, map)) {
    if (c.skipped) {
      ++r.skipped;
      r.details.push_back({{"t", c.t}, {"z", c.z}, {"n", c.n}, {"skipped", c.skip_reason}});
      continue;
    }
    const double bound = geometric_bound(alpha, c.n + 2);
    worst = std::max(worst, c.critical / bound);
    const bool base_ok = c.n != 0 || c.critical <= 1;
    if (!(c.critical < bound) || !base_ok) ++violations;
    r.details.push_back(
        {{"t", c.t}, {"z", c.z}, {"n", c.n}, {"critical", c.critical}, {"bound", bound}});
  }
  r.measured_constants["ratio_max"] = worst;
  r.measured_constants["violations"] = violations;
  finish(r, violations == 0, std::to_string(violations) + " critical count(s) at or above the bound",
         clock);
  return r;
}

VerificationReport check_cor_bm(const VerifySettings& s) {
  Stopwatch clock;
  VerificationReport r;
  r.statement = Statement::cor_bm;
  const HyperbolicToralMap map = make_map(s.map);
  record_admissibility(r, s.potential, map);
  const double alpha = map.expansion();
  const double cap = 4.0 * alpha * alpha;

  struct Case {
    double z = 0.0;
    int n = 0;
    bool skipped = false;
    std::string reason;
    std::vector<double> measure;
    double length = 0.0;
  };
  std::vector<Case> cases;
  for (int i = 0; i < s.z_count; ++i) {
    for (int n = 0; n <= s.n_max; ++n) {
      Case c;
      c.z = leaf_z(i, s.z_count);
      c.n = n;
      cases.push_back(std::move(c));
    }
  }
  parallel_for(cases.size(), [&](std::size_t k) {
    Case& c = cases[k];
    try {
      const Leaf leaf = leaf_from_z(map, c.z);
      c.length = leaf.length;
      const LeafAngleField field(leaf_kernel(s.potential, s.leaf_lambda, s.lb_t), map, leaf, c.n);
      const AngleOrbit orbit = orbit_along_leaf(field, s.resolution);
      for (double d : s.deltas) c.measure.push_back(bad_set_measure(field, orbit, d).measure);
    } catch (const ResolutionExhausted& e) {
      c.skipped = true;
      c.reason = e.what();
    }
  });

  int ratio_violations = 0;
  int drift_violations = 0;
  double ratio_max = 0.0;
  double drift_max = 0.0;
  for (const Case& c : cases) {
    if (c.skipped) {
      ++r.skipped;
      r.details.push_back({{"z", c.z}, {"n", c.n}, {"skipped", c.reason}});
      continue;
    }
    json row = {{"z", c.z}, {"n", c.n}, {"length", c.length}};
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t d = 0; d < s.deltas.size(); ++d) {
      const double ratio = c.measure[d] / s.deltas[d];
      row["ratio_delta_" + std::to_string(s.deltas[d])] = ratio;
      ratio_max = std::max(ratio_max, ratio);
      if (ratio > cap || c.measure[d] > c.length) ++ratio_violations;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    if (c.n >= s.drift_from_n) {
      const double drift = hi == 0.0 ? 0.0 : (hi - lo) / lo;
      row["drift"] = drift;
      drift_max = std::max(drift_max, drift);
      if (!(drift < s.drift_tol)) ++drift_violations;
    }
    r.details.push_back(row);
  }
  r.measured_constants["ratio_max"] = ratio_max;
  r.measured_constants["ratio_cap"] = cap;
  r.measured_constants["drift_max"] = drift_max;
  r.measured_constants["ratio_violations"] = ratio_violations;
  r.measured_constants["drift_violations"] = drift_violations;
  finish(r, ratio_violations == 0 && drift_violations == 0,
         std::to_string(ratio_violations) + " ratio and " + std::to_string(drift_violations) +
             " drift violation(s)",
         clock);
  return r;
}

VerificationReport check_lemma_lb(const VerifySettings& s) {
  Stopwatch clock;
  VerificationReport r;
  r.statement = Statement::lemma_lb;
  const HyperbolicToralMap map = make_map(s.map);
  const bool admissible = record_admissibility(r, s.potential, map);
  const double alpha = map.expansion();
  const double u_len = norm(map.unstable());
  const AngleKernel kernel = leaf_kernel(s.potential, s.leaf_lambda, s.lb_t);

  struct Point {
    double z = 0.0;
    double s = 0.0;
  };
  std::vector<Point> points(static_cast<std::size_t>(s.lb_points));
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto rng = substream(s.seed, i);
    std::uniform_real_distribution<double> uz(0.0, kSqrt2);
    double z = uz(rng);
    while (!(z > 0.0)) z = uz(rng);
    const Leaf leaf = leaf_from_z(map, z);
    std::uniform_real_distribution<double> us(0.0, leaf.length);
    double sp = us(rng);
    if (sp >= leaf.length) sp = 0.0;
    points[i] = {z, sp};
  }

  const int levels = s.n_max + 1;
  std::vector<double> value(points.size() * static_cast<std::size_t>(levels),
                            std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> skip(value.size());
  parallel_for(value.size(), [&](std::size_t k) {
    const Point& p = points[k / static_cast<std::size_t>(levels)];
    const int n = static_cast<int>(k % static_cast<std::size_t>(levels));
    try {
      const LeafAngleField field(kernel, map, leaf_from_z(map, p.z), n);
      const double h = std::min(1e-6, std::min(p.s, field.leaf().length - p.s) / 4.0);
      const double hd = std::min(h, default_fd_step(field, p.s));
      if (!(hd > 0.0)) throw StraddlesDiscontinuity("point lies on a discontinuity");
      value[k] = directional_derivative_theta(field, p.s, hd) * u_len;
    } catch (const StraddlesDiscontinuity& e) {
      skip[k] = e.what();
    }
  });

  std::vector<double> floors(static_cast<std::size_t>(levels),
                             std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < value.size(); ++k) {
    const int n = static_cast<int>(k % static_cast<std::size_t>(levels));
    if (!skip[k].empty()) {
      ++r.skipped;
      r.details.push_back({{"point", k / static_cast<std::size_t>(levels)}, {"n", n},
                           {"skipped", skip[k]}});
      continue;
    }
    const double scaled = value[k] / std::pow(alpha, n);
    floors[static_cast<std::size_t>(n)] = std::min(floors[static_cast<std::size_t>(n)], scaled);
  }
  bool ok = admissible;
  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = 0.0;
  double c_floor = std::numeric_limits<double>::infinity();
  for (int n = 0; n < levels; ++n) {
    const double f = floors[static_cast<std::size_t>(n)];
    const double ratio = f / floors[0];
    c_floor = std::min(c_floor, f);
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
    r.details.push_back({{"n", n}, {"floor", f}, {"ratio_to_n0", ratio}});
    if (!(f > 0.0) || !(ratio >= 1.0 / s.floor_factor && ratio <= s.floor_factor)) ok = false;
  }
  r.measured_constants["c_floor"] = c_floor;
  r.measured_constants["floor_n0"] = floors[0];
  r.measured_constants["ratio_min"] = ratio_min;
  r.measured_constants["ratio_max"] = ratio_max;
  finish(r, ok, "growth floor not positive or drifts beyond the allowed factor", clock);
  return r;
}

VerificationReport check_log_cos_bound(const VerifySettings& s) {
  Stopwatch clock;
  VerificationReport r;
  r.statement = Statement::log_cos_bound;
  const HyperbolicToralMap map = make_map(s.map);
  record_admissibility(r, s.potential, map);
  const Leaf leaf = leaf_from_z(map, s.logcos_z);
  bool ok = s.logcos_n >= 1;
  std::string why;
  try {
    const LeafAngleField field(leaf_kernel(s.potential, s.logcos_lambda, s.logcos_t), map, leaf,
                               s.logcos_n - 1);
    const auto count = static_cast<std::size_t>(s.logcos_n);
    std::vector<double> coarse(count);
    std::vector<double> fine(count);
    parallel_for(2 * count, [&](std::size_t k) {
      const int j = static_cast<int>(k % count);
      if (k < count) {
        coarse[k % count] = log_cos_integral(field, j, s.logcos_resolution);
      } else {
        fine[k % count] = log_cos_integral(field, j, 4 * s.logcos_resolution);
      }
    });
    double floor = std::numeric_limits<double>::infinity();
    double change = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      const double a = coarse[j] / leaf.length;
      const double b = fine[j] / leaf.length;
      floor = std::min(floor, b);
      change = std::max(change, std::abs(b - a));
      r.details.push_back({{"k", j}, {"integral_normalized", b}, {"coarse", a}, {"change", b - a}});
      if (!std::isfinite(a) || !std::isfinite(b)) ok = false;
    }
    r.measured_constants["C"] = -floor;
    r.measured_constants["refinement_change"] = change;
    if (!(change < s.logcos_refine_tol)) {
      ok = false;
      why = "quadrature changed by " + std::to_string(change) + " under 4x refinement";
    }
    if (!std::isfinite(floor)) why = "non-finite integral";
  } catch (const ResolutionExhausted& e) {
    ++r.skipped;
    r.details.push_back({{"skipped", e.what()}});
  }
  finish(r, ok, why, clock);
  return r;
}

// ---------------------------------------------------------------------------
// Polar factors

VerificationReport check_appendix_polar(const VerifySettings& s) {
  Stopwatch clock;
  VerificationReport r;
  r.statement = Statement::appendix_polar;
  const HyperbolicToralMap map = make_map(s.map);

  const auto count = static_cast<std::size_t>(s.polar_samples);
  std::vector<std::array<double, 4>> res(count);
  std::vector<std::string> skip(count);
  parallel_for(count, [&](std::size_t i) {
    auto rng = substream(s.seed, i);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const TorusPoint p{u01(rng), u01(rng)};
    const double t = -1.0 + 3.0 * u01(rng);
    const double lambda = std::exp(std::log(2.0) + (std::log(1000.0) - std::log(2.0)) * u01(rng));
    try {
      const CocycleParams params = CocycleParams::scaled(lambda, t);
      const PolarFactors here = polar_factors(s.potential, params, p, map);
      const PolarFactors next = polar_factors(s.potential, params, map.apply(p), map);
      const SL2 s_here = here.S1 * here.S2;
      const SL2 s_next = next.S1 * next.S2;
      const SL2 rebuilt = s_next * next.Lambda * here.O * s_here.inverse();
      const double scale = next.M.norm();
      const double recon = rebuilt.max_abs_diff(next.M) / scale;
      const SL2 id = SL2::identity();
      const double orth = std::max({(here.O.transpose() * here.O).max_abs_diff(id),
                                    (here.S2.transpose() * here.S2).max_abs_diff(id),
                                    (here.S1.transpose() * here.S1).max_abs_diff(id),
                                    std::abs(here.O.det() - 1.0), std::abs(here.S2.det() - 1.0)});
      const double nrm = lambda * std::sqrt(0.5 * here.beta_app);
      const double norm_res = std::abs(nrm - here.M.norm()) / here.M.norm();
      const double o11 = std::abs(here.O11 - here.O.m11);
      res[i] = {recon, orth, norm_res, o11};
    } catch (const DegenerateRotation& e) {
      skip[i] = e.what();
    }
  });
  std::array<double, 4> worst{};
  for (std::size_t i = 0; i < count; ++i) {
    if (!skip[i].empty()) {
      ++r.skipped;
      r.details.push_back({{"sample", i}, {"skipped", skip[i]}});
      continue;
    }
    for (std::size_t k = 0; k < 4; ++k) worst[k] = std::max(worst[k], res[i][k]);
  }
  r.measured_constants["reconstruction_residual"] = worst[0];
  r.measured_constants["orthogonality_residual"] = worst[1];
  r.measured_constants["norm_residual"] = worst[2];
  r.measured_constants["O11_closed_form_residual"] = worst[3];

  // O11 -> r / sqrt(r^2 + 1): log-log slope of the mean error against lambda.
  constexpr int kRatePoints = 64;
  std::vector<double> xs;
  std::vector<double> ys;
  for (double lambda : s.polar_lambdas) {
    std::vector<double> err(kRatePoints);
    for (int i = 0; i < kRatePoints; ++i) {
      auto rng = substream(s.seed ^ 0x5bd1e995u, static_cast<std::uint64_t>(i));
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      const TorusPoint p{u01(rng), u01(rng)};
      const double t = -1.0 + 3.0 * u01(rng);
      const PolarFactors f = polar_factors(s.potential, CocycleParams::scaled(lambda, t), p, map);
      err[static_cast<std::size_t>(i)] = std::abs(f.O.m11 - o11_limit(f.r));
    }
    const double mean = pairwise_sum(err) / kRatePoints;
    xs.push_back(std::log(lambda));
    ys.push_back(std::log(mean));
    r.details.push_back({{"case", "O11_rate"}, {"lambda", lambda}, {"mean_error", mean}});
  }
  double slope = std::numeric_limits<double>::quiet_NaN();
  if (xs.size() >= 2) {
    const double mx = pairwise_sum(xs) / static_cast<double>(xs.size());
    const double my = pairwise_sum(ys) / static_cast<double>(ys.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    slope = sxy / sxx;
  }
  r.measured_constants["O11_slope"] = slope;
  const bool ok = worst[0] < s.polar_tol && worst[1] < s.polar_tol && worst[2] < s.polar_tol &&
                  worst[3] < s.polar_tol && slope >= s.slope_min && slope <= s.slope_max;
  finish(r, ok, "polar residual or O11 rate outside tolerance", clock);
  return r;
}

VerificationReport run_statement(Statement st, const VerifySettings& s) {
  switch (st) {
    case Statement::thm_PLE:
      return check_theorem_ple(s, true);
    case Statement::thm_plepd:
      return check_theorem_ple(s, false);
    case Statement::thm_hple:
      return check_theorem_hple(s);
    case Statement::prop_fPLE:
      return check_prop_fple(s);
    case Statement::lemma_lb:
      return check_lemma_lb(s);
    case Statement::lemma_disc:
      return check_lemma_disc(s);
    case Statement::remark_monotone:
      return check_remark_monotone(s);
    case Statement::lemma_card:
      return check_lemma_card(s);
    case Statement::cor_bm:
      return check_cor_bm(s);
    case Statement::fubini:
      return check_fubini(s);
    case Statement::appendix_polar:
      return check_appendix_polar(s);
    case Statement::log_cos_bound:
      return check_log_cos_bound(s);
  }
  throw OutOfRange("unknown statement");
}

NegativeControl check_negative_control(const VerifySettings& s, double lambda,
                                       double deriv_floor, double min_gap) {
  NegativeControl nc;
  nc.min_gap = min_gap;
  const HyperbolicToralMap map = make_map(s.map);

  const Admissibility constant = check_admissible(Potential::constant(0.5), map);
  nc.constant_rejected = !constant.admissible;

  // v = 0.5 + eps (w1 + w2) with D_u v = eps (u1 + u2) = deriv_floor.
  const Vec2 u = map.unstable();
  const double eps = deriv_floor / (u.x + u.y);
  const Potential near = Potential::polynomial({0.5, eps}, {0.0, eps});
  const Admissibility near_adm = check_admissible(near, map);
  nc.near_constant_floor = near_adm.deriv_floor;

  const std::vector<double> near_t = linspace(0.45, 0.55, 5);
  const DeficitScan near_scan =
      deficit_scan(near, map, {lambda}, near_t, s.n, s.samples, s.seed);
  const DeficitScan ref_scan =
      deficit_scan(s.potential, map, {lambda}, s.t_grid, s.n, s.samples, s.seed);
  nc.near_constant_c0 = near_scan.c0.front();
  nc.reference_c0 = ref_scan.c0.front();
  nc.gap = nc.near_constant_c0 - nc.reference_c0;
  nc.passed = nc.constant_rejected && near_adm.admissible && nc.gap >= min_gap;
  nc.details = {{"constant_rejected", nc.constant_rejected},
                {"constant_reason", constant.reason},
                {"near_constant_admissible", near_adm.admissible},
                {"near_constant_floor", nc.near_constant_floor},
                {"lambda", lambda},
                {"near_constant_C0", nc.near_constant_c0},
                {"reference_C0", nc.reference_c0},
                {"gap", nc.gap},
                {"min_gap", min_gap},
                {"near_constant_rows", near_scan.rows}};
  return nc;
}

}  // namespace catlyap
