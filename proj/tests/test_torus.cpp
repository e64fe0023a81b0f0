#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "catlyap/errors.hpp"
#include "catlyap/torus.hpp"

using namespace catlyap;

namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;
const double kCatExpansion = (3.0 + std::sqrt(5.0)) / 2.0;

}  // namespace

TEST(Torus, CatMapEigendata) {
  const auto m = HyperbolicToralMap::cat();
  EXPECT_NEAR(m.expansion(), kCatExpansion, 1e-15);
  EXPECT_NEAR(m.unstable().x, kGolden, 1e-15);
  EXPECT_DOUBLE_EQ(m.unstable().y, 1.0);
  EXPECT_EQ(m.determinant(), 1);
  EXPECT_EQ(m.trace(), 3);
  EXPECT_NEAR(m.expansion() * (1.0 / m.expansion()), 1.0, 1e-14);
}

TEST(Torus, MakeMap) {
  EXPECT_NEAR(HyperbolicToralMap::make(2, 1, 1, 1).expansion(), kCatExpansion, 1e-15);
  const auto m = HyperbolicToralMap::make(3, 1, 2, 1);
  // root of x^2 - 4x + 1, and a power-iteration cross-check
  EXPECT_NEAR(m.expansion(), 2.0 + std::sqrt(3.0), 1e-14);
  Vec2 x{1.0, 0.3};
  double rate = 0.0;
  for (int k = 0; k < 60; ++k) {
    const Vec2 y = m.linear(x);
    rate = norm(y) / norm(x);
    x = (1.0 / norm(y)) * y;
  }
  EXPECT_NEAR(rate, m.expansion(), 1e-12);
  const Vec2 u = m.unstable();
  const Vec2 mu = m.linear(u);
  EXPECT_NEAR(mu.x, m.eigenvalue() * u.x, 1e-12);
  EXPECT_NEAR(mu.y, m.eigenvalue() * u.y, 1e-12);

  EXPECT_THROW(HyperbolicToralMap::make(1, 1, 1, 0), NotHyperbolic);
  EXPECT_THROW(HyperbolicToralMap::make(2, 1, 1, 2), NotUnimodular);
}

TEST(Torus, ApplyExamples) {
  const auto m = HyperbolicToralMap::cat();
  EXPECT_EQ(m.apply({0.0, 0.0}), (TorusPoint{0.0, 0.0}));
  const TorusPoint a = m.apply({0.2, 0.3});
  EXPECT_NEAR(a.w1, 0.7, 1e-15);
  EXPECT_NEAR(a.w2, 0.5, 1e-15);
  const TorusPoint b = m.apply({0.5, 0.5});
  EXPECT_DOUBLE_EQ(b.w1, 0.5);
  EXPECT_DOUBLE_EQ(b.w2, 0.0);
}

TEST(Torus, OrbitExamples) {
  const auto m = HyperbolicToralMap::cat();
  const auto o0 = m.orbit({0.2, 0.3}, 0);
  ASSERT_EQ(o0.size(), 1u);
  EXPECT_EQ(o0[0], (TorusPoint{0.2, 0.3}));

  const auto fixed = m.orbit({0.0, 0.0}, 5);
  ASSERT_EQ(fixed.size(), 6u);
  for (const auto& p : fixed) EXPECT_EQ(p, (TorusPoint{0.0, 0.0}));

  const auto o2 = m.orbit({0.2, 0.3}, 2);
  ASSERT_EQ(o2.size(), 3u);
  EXPECT_NEAR(o2[1].w1, 0.7, 1e-15);
  EXPECT_NEAR(o2[1].w2, 0.5, 1e-15);
  EXPECT_NEAR(o2[2].w1, 0.9, 1e-15);
  EXPECT_NEAR(o2[2].w2, 0.2, 1e-15);
}

TEST(Torus, InverseUndoesApply) {
  const auto m = HyperbolicToralMap::make(3, 1, 2, 1);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const TorusPoint p{u(rng), u(rng)};
    const TorusPoint q = m.apply_inverse(m.apply(p));
    EXPECT_LT(std::abs(std::remainder(q.w1 - p.w1, 1.0)), 1e-14);
    EXPECT_LT(std::abs(std::remainder(q.w2 - p.w2, 1.0)), 1e-14);
  }
}

// Dyadic rationals stay dyadic with the same denominator, so double arithmetic
// must agree with exact integer arithmetic mod q for every iterate.
TEST(Torus, ExactOnDyadicRationals) {
  for (const IntMatrix& mat : {IntMatrix{2, 1, 1, 1}, IntMatrix{3, 1, 2, 1}}) {
    const auto m = HyperbolicToralMap::make(mat[0], mat[1], mat[2], mat[3]);
    const std::int64_t q = 1 << 20;
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      std::int64_t x = static_cast<std::int64_t>(rng() % q);
      std::int64_t y = static_cast<std::int64_t>(rng() % q);
      TorusPoint p{static_cast<double>(x) / q, static_cast<double>(y) / q};
      for (int n = 1; n <= 60; ++n) {
        const std::int64_t nx = (mat[0] * x + mat[1] * y) % q;
        const std::int64_t ny = (mat[2] * x + mat[3] * y) % q;
        x = nx;
        y = ny;
        p = m.apply(p);
        ASSERT_EQ(p.w1, static_cast<double>(x) / q) << "n=" << n;
        ASSERT_EQ(p.w2, static_cast<double>(y) / q) << "n=" << n;
      }
    }
  }
}

TEST(Torus, RationalSingleStep) {
  const auto m = HyperbolicToralMap::cat();
  const std::int64_t q = 97;
  for (std::int64_t x = 0; x < q; x += 7) {
    for (std::int64_t y = 0; y < q; y += 5) {
      const TorusPoint p = m.apply({static_cast<double>(x) / q, static_cast<double>(y) / q});
      EXPECT_NEAR(p.w1, static_cast<double>((2 * x + y) % q) / q, 1e-15);
      EXPECT_NEAR(p.w2, static_cast<double>((x + y) % q) / q, 1e-15);
    }
  }
}

TEST(Torus, PushforwardIsUniform) {
  // chi-square on 16x16 bins, N = 1e6, 255 dof: the 0.01 critical value is 310.46
  const auto m = HyperbolicToralMap::cat();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int bins = 16;
  const int n = 1000000;
  std::vector<int> counts(bins * bins, 0);
  for (int i = 0; i < n; ++i) {
    const TorusPoint p = m.apply({u(rng), u(rng)});
    ++counts[static_cast<int>(p.w1 * bins) * bins + static_cast<int>(p.w2 * bins)];
  }
  const double expected = static_cast<double>(n) / (bins * bins);
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 310.46);
}

TEST(Torus, PowerOverflowIsReported) {
  const auto m = HyperbolicToralMap::cat();
  EXPECT_EQ(m.power(0), (IntMatrix{1, 0, 0, 1}));
  EXPECT_EQ(m.power(2), (IntMatrix{5, 3, 3, 2}));
  EXPECT_THROW(m.power(200), OutOfRange);
}
