#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("catlyap_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(CATLYAP_CLI) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << text;
  return p;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Cli, ScanGridAndDeterminism) {
  const fs::path a = workdir() / "scan_a.csv";
  const fs::path b = workdir() / "scan_b.csv";
  ASSERT_EQ(run("scan --n 20 --samples 4 --threads 1 --out " + a.string()), 0);
  ASSERT_EQ(run("scan --n 20 --samples 4 --threads 3 --out " + b.string()), 0);
  const std::string text = slurp(a);
  EXPECT_EQ(text, slurp(b));
  EXPECT_EQ(text.rfind("# catlyap ", 0), 0u);
  const auto rows = csv_rows(text);
  ASSERT_EQ(rows.size(), 184u);  // header + 3 x 61
  EXPECT_EQ(rows[0][9], "deficit");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double L = std::stod(rows[i][6]);
    const double log_lambda = std::stod(rows[i][8]);
    EXPECT_EQ(std::stod(rows[i][9]), log_lambda - L);
  }
}

TEST(Cli, FlagsOverrideConfig) {
  const fs::path cfg = write_file("small.json", R"({"lambdas": [10, 100], "n": 5, "samples": 3,
      "t_grid": [0.5], "seed": 1})");
  const fs::path out = workdir() / "override.csv";
  ASSERT_EQ(run("scan --config " + cfg.string() + " --lambda 7 --lambda 9 --seed 5 --out " +
                out.string()),
            0);
  const std::string text = slurp(out);
  EXPECT_NE(text.find("seed=5"), std::string::npos);
  const auto rows = csv_rows(text);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "7");
  EXPECT_EQ(rows[2][0], "9");
}

TEST(Cli, LeafCensus) {
  const fs::path cfg =
      write_file("census.json", R"({"z_grid": {"count": 6}, "census": {"n_max": 6, "resolution": 256}})");
  const fs::path out = workdir() / "census.csv";
  ASSERT_EQ(run("leaf-census --config " + cfg.string() + " --out " + out.string()), 0);
  const auto rows = csv_rows(slurp(out));
  ASSERT_EQ(rows.size(), 1u + 6 * 7);
  EXPECT_EQ(rows[0][0], "z");
  EXPECT_EQ(rows[0][7], "badset_measure");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(std::stod(rows[i][2]), std::stod(rows[i][3]));
    ASSERT_NE(rows[i][4], "skipped");
    EXPECT_LT(std::stod(rows[i][4]), std::stod(rows[i][5]));
    if (rows[i][1] == "0") EXPECT_EQ(rows[i][2], "0");
  }
}

TEST(Cli, VerifyPolarOnDefaults) {
  const fs::path out = workdir() / "polar.json";
  ASSERT_EQ(run("verify --suite appendix_polar --out " + out.string()), 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  ASSERT_EQ(doc.size(), 1u);
  EXPECT_TRUE(doc[0]["passed"].get<bool>());
  EXPECT_TRUE(doc[0].contains("provenance"));
  EXPECT_EQ(doc[0]["provenance"]["seed"], 20240601);
}

TEST(Cli, VerifyAllEmitsTwelveReports) {
  // every suite shrunk to seconds; only the report count matters here
  const fs::path cfg = write_file("tiny.json", R"({
    "lambdas": [10, 20], "t_grid": [0.0, 1.0], "n": 20, "samples": 8,
    "verify": {"spot_t": [3.5], "hple_maps": [[3, 1, 2, 1]], "leaf_t": [0.5],
      "disc_z_count": 3, "disc_n_max": 3, "z_count": 2, "n_max": 2, "resolution": 64,
      "lb_points": 3, "fple_z": [0.7], "fple_t": [0.5], "fple_samples": 8, "certificate_n": 2,
      "fubini_leaves": 2, "fubini_leaf_samples": 4, "fubini_torus_samples": 8,
      "polar_samples": 20, "logcos_n": 2, "logcos_resolution": 32}})");
  const fs::path out = workdir() / "all.json";
  const int code = run("verify --suite all --config " + cfg.string() + " --out " + out.string());
  EXPECT_TRUE(code == 0 || code == 1);
  const auto doc = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(doc.size(), 12u);
}

TEST(Cli, ExitCodes) {
  const fs::path constant =
      write_file("constant.json", R"({"potential": {"family": "constant", "value": 0.5}})");
  EXPECT_EQ(run("verify --suite lemma_lb --config " + constant.string() + " --out " +
                (workdir() / "neg.json").string()),
            1);
  EXPECT_EQ(run("certify-potential --config " + constant.string() + " --out " +
                (workdir() / "cert.json").string()),
            1);
  EXPECT_EQ(run("certify-potential --out " + (workdir() / "cert_ok.json").string()), 0);
  const fs::path bad = write_file("bad.json", R"({"n": "lots"})");
  EXPECT_EQ(run("scan --config " + bad.string()), 2);
  EXPECT_EQ(run("verify --suite nonsense"), 2);
  EXPECT_EQ(run("scan --config " + (workdir() / "missing.json").string()), 3);
  EXPECT_EQ(run("scan --n 5 --samples 2 --out /nonexistent_dir/x.csv"), 3);
}
