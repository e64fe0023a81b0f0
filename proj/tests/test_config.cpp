#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "catlyap/config.hpp"
#include "catlyap/errors.hpp"
#include "catlyap/runs.hpp"

using namespace catlyap;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig c = parse_config("{}");
  EXPECT_EQ(c.lambdas.size(), 3u);
  EXPECT_EQ(c.t_grid.size(), 61u);
  EXPECT_EQ(c.z_grid.size(), 50u);
  EXPECT_EQ(c.format, OutputFormat::csv);
  EXPECT_EQ(config_hash(c), config_hash(RunConfig()));
  EXPECT_EQ(config_hash(c).size(), 16u);
}

TEST(Config, Grids) {
  const RunConfig c = parse_config(
      R"({"t_grid": {"min": 0, "max": 1, "count": 5}, "z_grid": [0.5, 1.0],
          "lambdas": [20], "map": [3, 1, 2, 1], "format": "json"})");
  ASSERT_EQ(c.t_grid.size(), 5u);
  EXPECT_DOUBLE_EQ(c.t_grid[2], 0.5);
  EXPECT_EQ(c.z_grid.size(), 2u);
  EXPECT_NEAR(c.toral_map().expansion(), 2.0 + std::sqrt(3.0), 1e-14);
  EXPECT_EQ(c.format, OutputFormat::json);
  EXPECT_EQ(parse_config(R"({"z_grid": {"count": 8}})").z_grid.size(), 8u);
}

TEST(Config, Potentials) {
  const RunConfig log = parse_config(R"({"potential": {"family": "logarithm", "normalize": true}})");
  EXPECT_NEAR(log.potential().value(0.0, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(log.potential().scale(), 1.0 / std::log(3.0), 1e-15);
  const RunConfig poly =
      parse_config(R"({"potential": {"family": "polynomial", "a": [0, 0.5], "b": [0, 0.5]}})");
  EXPECT_DOUBLE_EQ(poly.potential().value(0.5, 0.5), 0.5);
  const RunConfig k = parse_config(R"({"potential": {"family": "constant", "value": 0.5}})");
  EXPECT_DOUBLE_EQ(k.potential().value(0.1, 0.9), 0.5);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(error_of(R"({"n": "many"})").find("'n'"), std::string::npos);
  EXPECT_NE(error_of(R"({"bogus": 1})").find("bogus"), std::string::npos);
  EXPECT_NE(error_of(R"({"map": [1, 1, 1, 0]})").find("map"), std::string::npos);
  EXPECT_NE(error_of(R"({"z_grid": [2.0]})").find("z_grid"), std::string::npos);
  EXPECT_NE(error_of(R"({"lambdas": [-1]})").find("lambdas"), std::string::npos);
  EXPECT_NE(error_of(R"({"format": "xml"})").find("format"), std::string::npos);
  EXPECT_NE(error_of(R"({"census": {"n_max": 13}})").find("census.n_max"), std::string::npos);
  EXPECT_NE(error_of(R"({"verify": {"nope": 1}})").find("verify.nope"), std::string::npos);
  EXPECT_NE(error_of(R"({"potential": {"family": "cubic"}})").find("potential"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"t_grid": {"min": 0, "count": 3}})").find("t_grid"), std::string::npos);
}

TEST(Config, SyntaxErrorsCarryLineAndColumn) {
  const std::string msg = error_of("{\n  \"n\": 10,\n  \"samples\": ]\n}");
  EXPECT_NE(msg.find("cfg.json:3:"), std::string::npos) << msg;
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
}

TEST(Runs, FormatRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 2.302585092994046, -1e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}

TEST(Runs, ScanCsv) {
  RunConfig c;
  c.t_grid = {0.0, 1.0};
  c.n = 50;
  c.samples = 10;
  const auto rows = run_scan(c);
  ASSERT_EQ(rows.size(), 6u);
  std::ostringstream out;
  write_scan(rows, provenance_of(c), OutputFormat::csv, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# catlyap ", 0), 0u);
  EXPECT_NE(line.find(config_hash(c)), std::string::npos);
  EXPECT_NE(line.find("seed=20240601"), std::string::npos);
  std::getline(in, line);
  EXPECT_EQ(line, "lambda,t,energy,n,samples,estimator,L,stderr,log_lambda,deficit");
  int data = 0;
  while (std::getline(in, line)) ++data;
  EXPECT_EQ(data, 6);
  for (const auto& r : rows) EXPECT_EQ(r.deficit, r.log_lambda - r.L);
}

TEST(Runs, CensusRows) {
  RunConfig c;
  c.z_grid = {0.4, 1.0};
  c.census.n_max = 4;
  c.census.resolution = 256;
  const auto rows = run_leaf_census(c);
  ASSERT_EQ(rows.size(), 10u);
  for (const auto& r : rows) {
    EXPECT_LT(r.crossings, r.disc_bound);
    ASSERT_FALSE(r.skipped);
    EXPECT_LT(r.critical, r.critical_bound);
    if (r.n == 0) EXPECT_EQ(r.crossings, 0);
  }
}
