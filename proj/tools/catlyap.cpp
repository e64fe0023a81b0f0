// catlyap: parameter sweeps, leaf census and verification suites.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "catlyap/config.hpp"
#include "catlyap/errors.hpp"
#include "catlyap/parallel.hpp"
#include "catlyap/runs.hpp"
#include "catlyap/verify.hpp"

namespace {

using namespace catlyap;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::optional<std::string> out;
  std::string suite = "all";
  std::vector<double> lambdas;
  std::optional<int> n;
  std::optional<int> samples;
};

RunConfig resolve(const Flags& f) {
  RunConfig cfg = f.config_path.empty() ? RunConfig() : load_config(f.config_path);
  const std::string origin = f.config_path.empty() ? "flags" : f.config_path;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.output = *f.out;
  if (!f.lambdas.empty()) cfg.lambdas = f.lambdas;
  if (f.n) cfg.n = *f.n;
  if (f.samples) cfg.samples = *f.samples;
  cfg.validate(origin);
  return cfg;
}

// Opens the configured output ("-" is stdout) and hands it to `emit`.
template <class Emit>
void with_output(const std::string& path, Emit&& emit) {
  if (path == "-" || path.empty()) {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  emit(file);
  file.flush();
  if (!file) throw IoError("write to '" + path + "' failed");
}

int cmd_scan(const Flags& f) {
  const RunConfig cfg = resolve(f);
  const auto rows = run_scan(cfg);
  with_output(cfg.output, [&](std::ostream& os) {
    write_scan(rows, provenance_of(cfg), cfg.format, os);
  });
  return kExitOk;
}

int cmd_leaf_census(const Flags& f) {
  const RunConfig cfg = resolve(f);
  const auto rows = run_leaf_census(cfg);
  with_output(cfg.output, [&](std::ostream& os) {
    write_census(rows, provenance_of(cfg), cfg.format, os);
  });
  return kExitOk;
}

int cmd_verify(const Flags& f) {
  const RunConfig cfg = resolve(f);
  std::vector<Statement> wanted;
  if (f.suite == "all") {
    wanted.assign(std::begin(kAllStatements), std::end(kAllStatements));
  } else {
    const auto st = statement_from_string(f.suite);
    if (!st) throw ConfigError("flag '--suite': unknown statement '" + f.suite + "'");
    wanted.push_back(*st);
  }
  const VerifySettings s = cfg.verify_settings();
  std::vector<VerificationReport> reports;
  bool all_passed = true;
  for (Statement st : wanted) {
    reports.push_back(run_statement(st, s));
    all_passed = all_passed && reports.back().passed;
    std::cerr << (reports.back().passed ? "PASS " : "FAIL ") << to_string(st) << '\n';
  }
  const json doc = reports_json(reports, provenance_of(cfg));
  with_output(cfg.output, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return all_passed ? kExitOk : kExitFailed;
}

int cmd_certify(const Flags& f) {
  const RunConfig cfg = resolve(f);
  const Admissibility a = check_admissible(cfg.potential(), cfg.toral_map());
  json doc = {{"admissible", a.admissible},
              {"sup_norm_measured", a.sup_norm},
              {"deriv_floor_measured", a.deriv_floor},
              {"provenance", to_json(provenance_of(cfg))}};
  if (!a.reason.empty()) doc["reason"] = a.reason;
  with_output(cfg.output, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return a.admissible ? kExitOk : kExitFailed;
}

int env_threads() {
  if (const char* v = std::getenv("CATLYAP_THREADS")) {
    try {
      const int n = std::stoi(v);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return default_thread_count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov exponents of Schrodinger cocycles over hyperbolic toral maps"};
  app.set_version_flag("--version", std::string(catlyap::version()));
  app.require_subcommand(1);

  Flags f;
  f.threads = env_threads();
  app.add_option("--config", f.config_path, "JSON run configuration");
  app.add_option("--threads", f.threads, "worker threads (env CATLYAP_THREADS)")
      ->check(CLI::PositiveNumber);

  auto common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config_path, "JSON run configuration");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", f.out, "output path, - for stdout");
    sub->add_option("--lambda", f.lambdas, "coupling (repeatable)")->take_all();
    sub->add_option("--n", f.n, "iterations per sample");
    sub->add_option("--samples", f.samples, "phase samples");
  };
  CLI::App* scan = app.add_subcommand("scan", "lambda x t sweep of the phase-averaged exponent");
  CLI::App* census = app.add_subcommand("leaf-census", "crossing / critical / bad-set census");
  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  CLI::App* certify = app.add_subcommand("certify-potential", "admissibility scan");
  for (CLI::App* sub : {scan, census, verify, certify}) common(sub);
  verify->add_option("--suite", f.suite, "all or a statement name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    catlyap::set_thread_count(f.threads);
    if (*scan) return cmd_scan(f);
    if (*census) return cmd_leaf_census(f);
    if (*verify) return cmd_verify(f);
    return cmd_certify(f);
  } catch (const catlyap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const catlyap::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const catlyap::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}
