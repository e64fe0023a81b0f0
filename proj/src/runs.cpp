#include "catlyap/runs.hpp"

#include <cmath>
#include <cstdio>

#include "catlyap/angle.hpp"
#include "catlyap/errors.hpp"
#include "catlyap/leaves.hpp"
#include "catlyap/lyapunov.hpp"
#include "catlyap/parallel.hpp"

#ifndef CATLYAP_VERSION
#define CATLYAP_VERSION "0.0.0"
#endif

namespace catlyap {

using nlohmann::json;

const char* version() { return CATLYAP_VERSION; }

Provenance provenance_of(const RunConfig& cfg) {
  return {config_hash(cfg), cfg.seed, version()};
}

json to_json(const Provenance& p) {
  return {{"config_hash", p.config_hash}, {"seed", p.seed}, {"version", p.version}};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void provenance_line(const Provenance& p, std::ostream& out) {
  out << "# catlyap " << p.version << " config_hash=" << p.config_hash << " seed=" << p.seed
      << '\n';
}

}  // namespace

std::vector<ScanRow> run_scan(const RunConfig& cfg) {
  const HyperbolicToralMap map = cfg.toral_map();
  const Potential v = cfg.potential();
  std::vector<ScanRow> rows;
  for (double lambda : cfg.lambdas) {
    for (double t : cfg.t_grid) {
      EstimateOptions opt;
      opt.n = cfg.n;
      opt.samples = cfg.samples;
      opt.seed = cfg.seed;
      opt.kind = cfg.kind;
      opt.estimator = cfg.estimator;
      opt.warmup = cfg.warmup;
      const CocycleParams params = CocycleParams::scaled(lambda, t);
      const LyapunovEstimate e = estimate_torus(v, params, map, opt);
      ScanRow row;
      row.lambda = lambda;
      row.t = t;
      row.energy = params.energy;
      row.n = cfg.n;
      row.samples = cfg.samples;
      row.estimator = cfg.estimator;
      row.L = e.value;
      row.std_error = e.std_error;
      row.log_lambda = std::log(lambda);
      row.deficit = row.log_lambda - row.L;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_scan(const std::vector<ScanRow>& rows, const Provenance& prov, OutputFormat format,
                std::ostream& out) {
  if (format == OutputFormat::json) {
    json arr = json::array();
    for (const ScanRow& r : rows) {
      arr.push_back({{"lambda", r.lambda},
                     {"t", r.t},
                     {"energy", r.energy},
                     {"n", r.n},
                     {"samples", r.samples},
                     {"estimator", std::string(to_string(r.estimator))},
                     {"L", r.L},
                     {"stderr", r.std_error},
                     {"log_lambda", r.log_lambda},
                     {"deficit", r.deficit}});
    }
    out << json{{"provenance", to_json(prov)}, {"rows", arr}}.dump(2) << '\n';
    return;
  }
  provenance_line(prov, out);
  out << "lambda,t,energy,n,samples,estimator,L,stderr,log_lambda,deficit\n";
  for (const ScanRow& r : rows) {
    out << format_double(r.lambda) << ',' << format_double(r.t) << ',' << format_double(r.energy)
        << ',' << r.n << ',' << r.samples << ',' << to_string(r.estimator) << ','
        << format_double(r.L) << ',' << format_double(r.std_error) << ','
        << format_double(r.log_lambda) << ',' << format_double(r.deficit) << '\n';
  }
}

std::vector<CensusRow> run_leaf_census(const RunConfig& cfg) {
  const HyperbolicToralMap map = cfg.toral_map();
  const AngleKernel kernel{cfg.potential(), CocycleParams::scaled(cfg.census.lambda, cfg.census.t)};
  const double alpha = map.expansion();
  const int levels = cfg.census.n_max + 1;
  std::vector<CensusRow> rows(cfg.z_grid.size() * static_cast<std::size_t>(levels));
  parallel_for(rows.size(), [&](std::size_t k) {
    CensusRow& row = rows[k];
    row.z = cfg.z_grid[k / static_cast<std::size_t>(levels)];
    row.n = static_cast<int>(k % static_cast<std::size_t>(levels));
    row.disc_bound = std::pow(alpha, row.n + 2);
    row.critical_bound = geometric_bound(alpha, row.n + 2);
    row.badset_delta = cfg.census.delta;
    const Leaf leaf = leaf_from_z(map, row.z);
    row.crossings = image_crossings(map, leaf, row.n).count;
    try {
      const LeafAngleField field(kernel, map, leaf, row.n);
      const AngleOrbit orbit = orbit_along_leaf(field, cfg.census.resolution);
      row.critical = critical_census(orbit);
      row.badset_measure = bad_set_measure(field, orbit, cfg.census.delta).measure;
    } catch (const ResolutionExhausted& e) {
      row.skipped = true;
      row.skip_reason = e.what();
    }
  });
  return rows;
}

void write_census(const std::vector<CensusRow>& rows, const Provenance& prov, OutputFormat format,
                  std::ostream& out) {
  if (format == OutputFormat::json) {
    json arr = json::array();
    for (const CensusRow& r : rows) {
      json row = {{"z", r.z},
                  {"n", r.n},
                  {"crossings", r.crossings},
                  {"disc_bound", r.disc_bound},
                  {"critical_bound", r.critical_bound},
                  {"badset_delta", r.badset_delta}};
      if (r.skipped) {
        row["skipped"] = r.skip_reason;
      } else {
        row["critical"] = r.critical;
        row["badset_measure"] = r.badset_measure;
      }
      arr.push_back(row);
    }
    out << json{{"provenance", to_json(prov)}, {"rows", arr}}.dump(2) << '\n';
    return;
  }
  provenance_line(prov, out);
  out << "z,n,crossings,disc_bound,critical,critical_bound,badset_delta,badset_measure\n";
  for (const CensusRow& r : rows) {
    out << format_double(r.z) << ',' << r.n << ',' << r.crossings << ','
        << format_double(r.disc_bound) << ',' << (r.skipped ? "skipped" : std::to_string(r.critical))
        << ',' << format_double(r.critical_bound) << ',' << format_double(r.badset_delta) << ','
        << (r.skipped ? std::string("skipped") : format_double(r.badset_measure)) << '\n';
  }
}

json reports_json(const std::vector<VerificationReport>& reports, const Provenance& prov) {
  json arr = json::array();
  for (const VerificationReport& r : reports) {
    json j = to_json(r);
    j["provenance"] = to_json(prov);
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace catlyap
