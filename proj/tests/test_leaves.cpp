#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "catlyap/errors.hpp"
#include "catlyap/leaves.hpp"
#include "catlyap/parallel.hpp"

using namespace catlyap;

namespace {

const double kMaxLength = std::sqrt((5.0 - std::sqrt(5.0)) / 2.0);

}  // namespace

TEST(Leaves, CentralLeafLength) {
  const auto map = HyperbolicToralMap::cat();
  const Leaf leaf = leaf_from_z(map, kSqrt2 / 2);
  EXPECT_NEAR(leaf.anchor.w1, 0.5, 1e-15);
  EXPECT_NEAR(leaf.anchor.w2, 0.5, 1e-15);
  EXPECT_NEAR(leaf.length, kMaxLength, 1e-12);
  EXPECT_NEAR(max_leaf_length(map), kMaxLength, 1e-12);
}

TEST(Leaves, LengthsShrinkAndAreBounded) {
  const auto map = HyperbolicToralMap::cat();
  EXPECT_LT(leaf_from_z(map, 1e-9).length, 1e-8);
  for (int i = 1; i < 1000; ++i) {
    EXPECT_LE(leaf_from_z(map, i * kSqrt2 / 1000).length, kMaxLength + 1e-12);
  }
  EXPECT_THROW(leaf_from_z(map, 0.0), OutOfRange);
  EXPECT_THROW(leaf_from_z(map, kSqrt2), OutOfRange);
}

TEST(Leaves, NegativeSlopeIsUnsupported) {
  // [2 -1; -1 1]: unstable direction has negative slope
  const auto map = HyperbolicToralMap::make(2, -1, -1, 1);
  EXPECT_THROW(leaf_from_z(map, 0.5), UnsupportedGeometry);
}

TEST(Leaves, LeafPoints) {
  const auto map = HyperbolicToralMap::cat();
  const Leaf leaf = leaf_from_z(map, 0.4);
  EXPECT_EQ(leaf_point(leaf, 0.0), leaf.start);
  const TorusPoint a = leaf_point(leaf, leaf.anchor_param);
  EXPECT_NEAR(a.w1, leaf.anchor.w1, 1e-14);
  EXPECT_NEAR(a.w2, leaf.anchor.w2, 1e-14);
  EXPECT_NEAR(a.w1 + a.w2, 1.0, 1e-14);
  const double eps = 1e-9;
  const TorusPoint e = leaf_point(leaf, leaf.length - eps);
  const Vec2 end = leaf.start.vec() + leaf.length * leaf.direction;
  EXPECT_LT(norm(e.vec() - end), 2 * eps);
  EXPECT_THROW(leaf_point(leaf, leaf.length), OutOfRange);
  EXPECT_THROW(leaf_point(leaf, -1e-3), OutOfRange);
}

TEST(Leaves, LeafOfPoint) {
  const auto map = HyperbolicToralMap::cat();
  const Leaf l0 = leaf_from_z(map, 0.9);
  const auto [back, s] = leaf_of_point(map, l0.anchor);
  EXPECT_NEAR(back.z, 0.9, 1e-12);
  EXPECT_NEAR(s, l0.anchor_param, 1e-12);

  const auto [edge, s0] = leaf_of_point(map, {0.5, 0.0});
  EXPECT_NEAR(s0, 0.0, 1e-15);
  EXPECT_NEAR(edge.start.w1, 0.5, 1e-14);
  EXPECT_NEAR(edge.start.w2, 0.0, 1e-14);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Leaf leaf = leaf_from_z(map, (0.001 + 0.998 * u(rng)) * kSqrt2);
    const double s1 = u(rng) * leaf.length;
    const auto [l2, s2] = leaf_of_point(map, leaf_point(leaf, s1));
    ASSERT_NEAR(l2.z, leaf.z, 1e-10);
    ASSERT_NEAR(s2, s1, 1e-10);
  }
}

TEST(Leaves, CrossingsAtLevelZero) {
  const auto map = HyperbolicToralMap::cat();
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(image_crossings(map, leaf_from_z(map, (i + 0.5) * kSqrt2 / 50), 0).count, 0);
  }
}

TEST(Leaves, CrossingBoundAndDiscLemma) {
  for (const IntMatrix& m : {IntMatrix{2, 1, 1, 1}, IntMatrix{3, 1, 2, 1}}) {
    const auto map = HyperbolicToralMap::make(m[0], m[1], m[2], m[3]);
    for (int i = 0; i < 50; ++i) {
      const Leaf leaf = leaf_from_z(map, (i + 0.5) * kSqrt2 / 50);
      const int n_max = map.expansion() < 3.0 ? 12 : 8;
      for (int n = 0; n <= n_max; ++n) {
        const int count = image_crossings(map, leaf, n).count;
        EXPECT_LE(count, crossing_count_bound(map, leaf, n));
        EXPECT_LT(count, std::pow(map.expansion(), n + 2));
      }
    }
  }
}

TEST(Leaves, CrossingsMatchDenseSampling) {
  const auto map = HyperbolicToralMap::cat();
  const Leaf leaf = leaf_from_z(map, kSqrt2 / 2);
  const int n = 3;
  const IntMatrix p = map.power(n);
  auto image = [&](double s) {
    const Vec2 x = leaf.start.vec() + s * leaf.direction;
    return Vec2{p[0] * x.x + p[1] * x.y, p[2] * x.x + p[3] * x.y};
  };
  int brute = 0;
  Vec2 prev = image(0.0);
  const double h = 1e-6;
  for (double s = h; s < leaf.length; s += h) {
    const Vec2 cur = image(s);
    if (std::floor(cur.x) != std::floor(prev.x) || std::floor(cur.y) != std::floor(prev.y)) {
      ++brute;
    }
    prev = cur;
  }
  EXPECT_EQ(image_crossings(map, leaf, n).count, brute);
}

TEST(Leaves, ImageDecomposition) {
  const auto map = HyperbolicToralMap::cat();
  const Leaf leaf = leaf_from_z(map, 0.8);
  const auto zero = image_decomposition(map, leaf, 0);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_NEAR(zero[0].target.z, leaf.z, 1e-12);
  EXPECT_NEAR(zero[0].target_begin, 0.0, 1e-12);
  EXPECT_NEAR(zero[0].target_end, leaf.length, 1e-12);

  for (int n = 1; n <= 6; ++n) {
    const auto pieces = image_decomposition(map, leaf, n);
    const double stretch = std::pow(map.expansion(), n);
    double total = 0.0;
    double covered = 0.0;
    for (const auto& pc : pieces) {
      total += pc.s_end - pc.s_begin;
      covered += pc.target_end - pc.target_begin;
    }
    EXPECT_NEAR(total, leaf.length, 1e-12);
    EXPECT_NEAR(covered, stretch * leaf.length, 1e-9 * stretch);

    // pieces sharing a target leaf must not overlap there
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      for (std::size_t j = i + 1; j < pieces.size(); ++j) {
        if (std::abs(pieces[i].target.z - pieces[j].target.z) > 1e-12) continue;
        const double lo = std::max(pieces[i].target_begin, pieces[j].target_begin);
        const double hi = std::min(pieces[i].target_end, pieces[j].target_end);
        EXPECT_LE(hi - lo, 1e-10);
      }
    }
  }

  const auto two = image_decomposition(map, leaf, 2);
  const IntMatrix p2 = map.power(2);
  for (std::size_t i = 1; i + 1 < two.size(); ++i) {
    const auto& pc = two[i];
    const Vec2 x = leaf.start.vec() + pc.s_begin * leaf.direction;
    const Vec2 ix{p2[0] * x.x + p2[1] * x.y, p2[2] * x.x + p2[3] * x.y};
    // the piece starts on a crossing; nudge inside before reducing mod 1
    const Vec2 d = map.linear(map.linear(leaf.direction));
    const Vec2 probe = ix + (1e-9 / norm(d)) * d;
    const auto [target, s] = leaf_of_point(map, TorusPoint::canonical(probe.x, probe.y));
    EXPECT_NEAR(target.z, pc.target.z, 1e-10);
    EXPECT_NEAR(s, pc.target_begin, 1e-8);
  }
}

// Jacobian-weighted double integral over (z, s) equals the plain torus integral.
TEST(Leaves, FubiniConsistency) {
  const auto map = HyperbolicToralMap::cat();
  auto h = [](TorusPoint p) {
    return std::exp(p.w1) * std::cos(2.0 * p.w2) + p.w1 * p.w2;
  };
  const int nz = 2000;
  const int ns = 200;
  double leafwise = 0.0;
  for (int i = 0; i < nz; ++i) {
    const Leaf leaf = leaf_from_z(map, (i + 0.5) * kSqrt2 / nz);
    double inner = 0.0;
    for (int k = 0; k < ns; ++k) inner += h(leaf_point(leaf, (k + 0.5) * leaf.length / ns));
    leafwise += inner * leaf.length / ns;
  }
  leafwise *= fubini_jacobian(map) * kSqrt2 / nz;

  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs(200000);
  for (double& x : xs) x = h({u(rng), u(rng)});
  const SampleStats st = sample_stats(xs);
  EXPECT_NEAR(leafwise, st.mean, 3 * st.std_error);
}
