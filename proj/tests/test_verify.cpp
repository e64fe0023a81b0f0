#include <gtest/gtest.h>

#include "catlyap/verify.hpp"

using namespace catlyap;

namespace {

VerifySettings small() {
  VerifySettings s;
  s.lambdas = {10.0, 100.0};
  s.t_grid = linspace(-1.0, 2.0, 4);
  s.n = 200;
  s.samples = 50;
  s.disc_z_count = 10;
  s.z_count = 3;
  s.n_max = 4;
  s.resolution = 256;
  s.lb_points = 10;
  s.polar_samples = 1000;
  return s;
}

nlohmann::json without_runtime(const VerificationReport& r) {
  nlohmann::json j = to_json(r);
  j.erase("runtime_seconds");
  return j;
}

}  // namespace

TEST(Verify, StatementNames) {
  int count = 0;
  for (Statement s : kAllStatements) {
    ++count;
    EXPECT_EQ(statement_from_string(to_string(s)), s);
  }
  EXPECT_EQ(count, 12);
  EXPECT_FALSE(statement_from_string("nonsense").has_value());
}

TEST(Verify, Linspace) {
  const auto g = VerifySettings::default_t_grid();
  ASSERT_EQ(g.size(), 61u);
  EXPECT_DOUBLE_EQ(g.front(), -1.0);
  EXPECT_DOUBLE_EQ(g.back(), 2.0);
}

TEST(Verify, Admissibility) {
  const auto map = HyperbolicToralMap::cat();
  EXPECT_FALSE(check_admissible(Potential::constant(0.5), map).admissible);
  EXPECT_TRUE(check_admissible(Potential::exponential().normalized(), map).admissible);
  // unnormalized exponential exceeds the unit sup bound
  EXPECT_FALSE(check_admissible(Potential::exponential(), map).admissible);
}

TEST(Verify, PolarPasses) {
  const auto r = check_appendix_polar(small());
  EXPECT_TRUE(r.passed) << r.reason;
  EXPECT_LT(r.measured_constants.at("reconstruction_residual"), 1e-10);
}

TEST(Verify, DiscLemmaPassesAndIsReproducible) {
  const auto a = check_lemma_disc(small());
  EXPECT_TRUE(a.passed) << a.reason;
  EXPECT_EQ(without_runtime(a), without_runtime(check_lemma_disc(small())));
}

TEST(Verify, LeafStatementsAtSmallScale) {
  const VerifySettings s = small();
  for (Statement st : {Statement::remark_monotone, Statement::lemma_card, Statement::lemma_lb}) {
    const auto r = run_statement(st, s);
    EXPECT_TRUE(r.passed) << to_string(st) << ": " << r.reason;
    EXPECT_EQ(r.skipped, 0);
  }
  // the drift half needs the full delta ladder and n range; only the cap is checked here
  const auto bm = check_cor_bm(s);
  EXPECT_EQ(bm.measured_constants.at("ratio_violations"), 0.0);
  EXPECT_LE(bm.measured_constants.at("ratio_max"), bm.measured_constants.at("ratio_cap"));
}

TEST(Verify, InadmissiblePotentialFails) {
  VerifySettings s = small();
  s.potential = Potential::constant(0.5);
  for (Statement st : {Statement::lemma_lb, Statement::lemma_card, Statement::thm_plepd}) {
    const auto r = run_statement(st, s);
    EXPECT_FALSE(r.passed) << to_string(st);
    EXPECT_FALSE(r.reason.empty());
  }
}

TEST(Verify, ReportSchema) {
  const auto j = to_json(check_lemma_disc(small()));
  for (const char* key : {"statement", "passed", "measured_constants", "details",
                          "runtime_seconds"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["statement"], "lemma_disc");
}
