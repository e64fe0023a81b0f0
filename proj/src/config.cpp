#include "catlyap/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "catlyap/errors.hpp"
#include "catlyap/leaves.hpp"

namespace catlyap {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& origin, const std::string& field, const std::string& what) {
  throw ConfigError(origin + ": field '" + field + "': " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& origin,
                const std::string& prefix) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) bad(origin, prefix + it.key(), "unknown field");
  }
}

double get_number(const json& v, const std::string& origin, const std::string& field) {
  if (!v.is_number()) bad(origin, field, "expected a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& origin, const std::string& field) {
  if (!v.is_number_integer()) bad(origin, field, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < -2147483647 || x > 2147483647) bad(origin, field, "integer out of range");
  return static_cast<int>(x);
}

std::vector<double> get_numbers(const json& v, const std::string& origin,
                                const std::string& field) {
  if (!v.is_array()) bad(origin, field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_number(v[i], origin, field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

IntMatrix get_matrix(const json& v, const std::string& origin, const std::string& field) {
  if (!v.is_array() || v.size() != 4) bad(origin, field, "expected 4 integers [a, b, c, d]");
  IntMatrix m{};
  for (std::size_t i = 0; i < 4; ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    if (!v[i].is_number_integer()) bad(origin, f, "expected an integer");
    m[i] = v[i].get<std::int64_t>();
  }
  return m;
}

// {min, max, count} or an explicit list.
std::vector<double> get_grid(const json& v, const std::string& origin, const std::string& field) {
  if (v.is_array()) return get_numbers(v, origin, field);
  if (!v.is_object()) bad(origin, field, "expected {min, max, count} or a list");
  check_keys(v, {"min", "max", "count"}, origin, field + ".");
  for (const char* k : {"min", "max", "count"}) {
    if (!v.contains(k)) bad(origin, field + "." + k, "missing");
  }
  const int count = get_int(v["count"], origin, field + ".count");
  if (count < 1) bad(origin, field + ".count", "must be >= 1");
  return linspace(get_number(v["min"], origin, field + ".min"),
                  get_number(v["max"], origin, field + ".max"), count);
}

std::vector<double> midpoint_z(int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back((i + 0.5) * kSqrt2 / count);
  return out;
}

std::string format_parse_error(const std::string& text, const json::parse_error& e,
                               const std::string& origin) {
  std::size_t line = 1;
  std::size_t col = 1;
  const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what();
}

CocycleKind kind_from(const std::string& s, const std::string& origin) {
  if (s == "raw") return CocycleKind::raw;
  if (s == "conjugated") return CocycleKind::conjugated;
  if (s == "reduced") return CocycleKind::reduced;
  bad(origin, "cocycle", "expected raw, conjugated or reduced");
}

Estimator estimator_from(const std::string& s, const std::string& origin) {
  if (s == "vector_iteration") return Estimator::vector_iteration;
  if (s == "norm_product") return Estimator::norm_product;
  bad(origin, "estimator", "expected vector_iteration or norm_product");
}

const std::set<std::string> kVerifyKeys = {
    "stability_tol", "spot_t",         "hple_maps",     "leaf_lambda",     "leaf_t",
    "disc_z_count",  "disc_n_max",     "z_count",       "n_max",           "resolution",
    "deltas",        "drift_tol",      "drift_from_n",  "lb_points",       "lb_t",
    "floor_factor",  "fple_z",         "fple_t",        "fple_samples",    "certificate_n",
    "fubini_lambda", "fubini_t",       "fubini_leaves", "fubini_leaf_samples",
    "fubini_torus_samples", "polar_samples", "polar_lambdas", "polar_tol", "slope_min",
    "slope_max",     "logcos_lambda",  "logcos_t",      "logcos_z",        "logcos_n",
    "logcos_resolution", "logcos_refine_tol",
};

void apply_verify_block(VerifySettings& s, const json& b, const std::string& origin) {
  const std::string p = "verify.";
  auto num = [&](const char* k, double& dst) {
    if (b.contains(k)) dst = get_number(b[k], origin, p + k);
  };
  auto integer = [&](const char* k, int& dst) {
    if (b.contains(k)) dst = get_int(b[k], origin, p + k);
  };
  auto list = [&](const char* k, std::vector<double>& dst) {
    if (b.contains(k)) dst = get_numbers(b[k], origin, p + k);
  };
  num("stability_tol", s.stability_tol);
  list("spot_t", s.spot_t);
  if (b.contains("hple_maps")) {
    const json& m = b["hple_maps"];
    if (!m.is_array()) bad(origin, p + "hple_maps", "expected a list of matrices");
    s.hple_maps.clear();
    for (std::size_t i = 0; i < m.size(); ++i) {
      s.hple_maps.push_back(get_matrix(m[i], origin, p + "hple_maps[" + std::to_string(i) + "]"));
    }
  }
  num("leaf_lambda", s.leaf_lambda);
  list("leaf_t", s.leaf_t);
  integer("disc_z_count", s.disc_z_count);
  integer("disc_n_max", s.disc_n_max);
  integer("z_count", s.z_count);
  integer("n_max", s.n_max);
  integer("resolution", s.resolution);
  list("deltas", s.deltas);
  num("drift_tol", s.drift_tol);
  integer("drift_from_n", s.drift_from_n);
  integer("lb_points", s.lb_points);
  num("lb_t", s.lb_t);
  num("floor_factor", s.floor_factor);
  list("fple_z", s.fple_z);
  list("fple_t", s.fple_t);
  integer("fple_samples", s.fple_samples);
  integer("certificate_n", s.certificate_n);
  num("fubini_lambda", s.fubini_lambda);
  num("fubini_t", s.fubini_t);
  integer("fubini_leaves", s.fubini_leaves);
  integer("fubini_leaf_samples", s.fubini_leaf_samples);
  integer("fubini_torus_samples", s.fubini_torus_samples);
  integer("polar_samples", s.polar_samples);
  list("polar_lambdas", s.polar_lambdas);
  num("polar_tol", s.polar_tol);
  num("slope_min", s.slope_min);
  num("slope_max", s.slope_max);
  num("logcos_lambda", s.logcos_lambda);
  num("logcos_t", s.logcos_t);
  num("logcos_z", s.logcos_z);
  integer("logcos_n", s.logcos_n);
  integer("logcos_resolution", s.logcos_resolution);
  num("logcos_refine_tol", s.logcos_refine_tol);
}

}  // namespace

RunConfig::RunConfig() : z_grid(midpoint_z(50)) {}

HyperbolicToralMap RunConfig::toral_map() const {
  return HyperbolicToralMap::make(map[0], map[1], map[2], map[3]);
}

Potential RunConfig::potential() const { return potential_from_json(potential_block); }

Potential potential_from_json(const json& block, const std::string& field,
                              const std::string& origin) {
  if (!block.is_object()) bad(origin, field, "expected an object");
  if (!block.contains("family") || !block["family"].is_string()) {
    bad(origin, field + ".family", "expected a string");
  }
  const std::string family = block["family"].get<std::string>();
  bool normalize = false;
  if (block.contains("normalize")) {
    if (!block["normalize"].is_boolean()) bad(origin, field + ".normalize", "expected a boolean");
    normalize = block["normalize"].get<bool>();
  }
  Potential v = Potential::constant(0.0);
  if (family == "exponential") {
    check_keys(block, {"family", "normalize", "scale"}, origin, field + ".");
    v = Potential::exponential();
  } else if (family == "logarithm") {
    check_keys(block, {"family", "normalize", "scale"}, origin, field + ".");
    v = Potential::logarithm();
  } else if (family == "polynomial") {
    check_keys(block, {"family", "normalize", "scale", "a", "b"}, origin, field + ".");
    std::vector<double> a;
    std::vector<double> b;
    if (block.contains("a")) a = get_numbers(block["a"], origin, field + ".a");
    if (block.contains("b")) b = get_numbers(block["b"], origin, field + ".b");
    v = Potential::polynomial(a, b);
  } else if (family == "constant") {
    check_keys(block, {"family", "normalize", "scale", "value"}, origin, field + ".");
    if (!block.contains("value")) bad(origin, field + ".value", "missing");
    v = Potential::constant(get_number(block["value"], origin, field + ".value"));
  } else {
    bad(origin, field + ".family", "expected exponential, logarithm, polynomial or constant");
  }
  if (block.contains("scale")) v = v.scaled(get_number(block["scale"], origin, field + ".scale"));
  return normalize ? v.normalized() : v;
}

VerifySettings RunConfig::verify_settings() const {
  VerifySettings s;
  s.map = map;
  s.potential = potential();
  s.seed = seed;
  s.lambdas = lambdas;
  s.t_grid = t_grid;
  s.n = n;
  s.samples = samples;
  apply_verify_block(s, verify_block, "config");
  return s;
}

json RunConfig::to_json() const {
  json census_j = {{"lambda", census.lambda},
                   {"t", census.t},
                   {"n_max", census.n_max},
                   {"delta", census.delta},
                   {"resolution", census.resolution}};
  return {{"map", map},
          {"potential", potential_block},
          {"lambdas", lambdas},
          {"t_grid", t_grid},
          {"n", n},
          {"samples", samples},
          {"seed", seed},
          {"z_grid", z_grid},
          {"output", output},
          {"format", format == OutputFormat::csv ? "csv" : "json"},
          {"estimator", std::string(to_string(estimator))},
          {"cocycle", std::string(to_string(kind))},
          {"warmup", warmup},
          {"census", census_j},
          {"verify", verify_block}};
}

void RunConfig::validate(const std::string& o) const {
  try {
    (void)toral_map();
  } catch (const Error& e) {
    bad(o, "map", e.what());
  }
  (void)potential();
  if (lambdas.empty()) bad(o, "lambdas", "must be nonempty");
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) bad(o, "lambdas", "every lambda must be finite and > 0");
  }
  if (t_grid.empty()) bad(o, "t_grid", "must be nonempty");
  for (double t : t_grid) {
    if (!std::isfinite(t)) bad(o, "t_grid", "values must be finite");
  }
  if (n < 1) bad(o, "n", "must be >= 1");
  if (samples < 1) bad(o, "samples", "must be >= 1");
  if (warmup < 0) bad(o, "warmup", "must be >= 0");
  for (double z : z_grid) {
    if (!(z > 0.0 && z < kSqrt2)) bad(o, "z_grid", "every z must lie in (0, sqrt 2)");
  }
  if (census.n_max < 0 || census.n_max > 12) bad(o, "census.n_max", "must lie in [0, 12]");
  if (!(census.lambda > 0.0)) bad(o, "census.lambda", "must be > 0");
  if (!(census.delta > 0.0 && census.delta < 1.5707963267948966)) {
    bad(o, "census.delta", "must lie in (0, pi/2)");
  }
  if (census.resolution < 2) bad(o, "census.resolution", "must be >= 2");
  const VerifySettings s = verify_settings();
  if (s.n_max < 0 || s.n_max > 12) bad(o, "verify.n_max", "must lie in [0, 12]");
  if (s.disc_n_max < 0 || s.disc_n_max > 12) bad(o, "verify.disc_n_max", "must lie in [0, 12]");
  if (s.resolution < 2) bad(o, "verify.resolution", "must be >= 2");
  for (const IntMatrix& m : s.hple_maps) {
    try {
      (void)HyperbolicToralMap::make(m[0], m[1], m[2], m[3]);
    } catch (const Error& e) {
      bad(o, "verify.hple_maps", e.what());
    }
  }
  for (double d : s.deltas) {
    if (!(d > 0.0 && d < 1.5707963267948966)) bad(o, "verify.deltas", "must lie in (0, pi/2)");
  }
  for (double l : s.polar_lambdas) {
    if (!(l >= 2.0)) bad(o, "verify.polar_lambdas", "must be >= 2");
  }
}

RunConfig config_from_json(const json& doc, const std::string& origin) {
  if (!doc.is_object()) throw ConfigError(origin + ": top level must be a JSON object");
  check_keys(doc,
             {"map", "potential", "lambdas", "t_grid", "n", "samples", "seed", "z_grid", "output",
              "format", "estimator", "cocycle", "warmup", "census", "verify"},
             origin, "");
  RunConfig c;
  if (doc.contains("map")) c.map = get_matrix(doc["map"], origin, "map");
  if (doc.contains("potential")) {
    c.potential_block = doc["potential"];
    (void)potential_from_json(c.potential_block, "potential", origin);
  }
  if (doc.contains("lambdas")) c.lambdas = get_numbers(doc["lambdas"], origin, "lambdas");
  if (doc.contains("t_grid")) c.t_grid = get_grid(doc["t_grid"], origin, "t_grid");
  if (doc.contains("n")) c.n = get_int(doc["n"], origin, "n");
  if (doc.contains("samples")) c.samples = get_int(doc["samples"], origin, "samples");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) bad(origin, "seed", "expected a nonnegative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("z_grid")) {
    const json& z = doc["z_grid"];
    if (z.is_object() && z.contains("count") && z.size() == 1) {
      const int count = get_int(z["count"], origin, "z_grid.count");
      if (count < 1) bad(origin, "z_grid.count", "must be >= 1");
      c.z_grid = midpoint_z(count);
    } else {
      c.z_grid = get_grid(z, origin, "z_grid");
    }
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) bad(origin, "output", "expected a path string");
    c.output = doc["output"].get<std::string>();
  }
  if (doc.contains("format")) {
    const json& f = doc["format"];
    if (f == "csv") {
      c.format = OutputFormat::csv;
    } else if (f == "json") {
      c.format = OutputFormat::json;
    } else {
      bad(origin, "format", "expected \"csv\" or \"json\"");
    }
  }
  if (doc.contains("estimator")) {
    if (!doc["estimator"].is_string()) bad(origin, "estimator", "expected a string");
    c.estimator = estimator_from(doc["estimator"].get<std::string>(), origin);
  }
  if (doc.contains("cocycle")) {
    if (!doc["cocycle"].is_string()) bad(origin, "cocycle", "expected a string");
    c.kind = kind_from(doc["cocycle"].get<std::string>(), origin);
  }
  if (doc.contains("warmup")) c.warmup = get_int(doc["warmup"], origin, "warmup");
  if (doc.contains("census")) {
    const json& b = doc["census"];
    if (!b.is_object()) bad(origin, "census", "expected an object");
    check_keys(b, {"lambda", "t", "n_max", "delta", "resolution"}, origin, "census.");
    if (b.contains("lambda")) c.census.lambda = get_number(b["lambda"], origin, "census.lambda");
    if (b.contains("t")) c.census.t = get_number(b["t"], origin, "census.t");
    if (b.contains("n_max")) c.census.n_max = get_int(b["n_max"], origin, "census.n_max");
    if (b.contains("delta")) c.census.delta = get_number(b["delta"], origin, "census.delta");
    if (b.contains("resolution")) {
      c.census.resolution = get_int(b["resolution"], origin, "census.resolution");
    }
  }
  if (doc.contains("verify")) {
    const json& b = doc["verify"];
    if (!b.is_object()) bad(origin, "verify", "expected an object");
    check_keys(b, kVerifyKeys, origin, "verify.");
    c.verify_block = b;
    VerifySettings probe;
    apply_verify_block(probe, b, origin);
  }
  c.validate(origin);
  return c;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(format_parse_error(text, e, origin));
  }
  return config_from_json(doc, origin);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file '" + path + "'");
  return parse_config(buf.str(), path);
}

std::string config_hash(const RunConfig& cfg) {
  // where the output goes does not change what is computed
  json doc = cfg.to_json();
  doc.erase("output");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace catlyap
