#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "catlyap/angle.hpp"
#include "catlyap/cocycle.hpp"
#include "catlyap/errors.hpp"

using namespace catlyap;

namespace {

void expect_matrix_near(const SL2& a, const SL2& b, double tol) {
  EXPECT_NEAR(a.m11, b.m11, tol);
  EXPECT_NEAR(a.m12, b.m12, tol);
  EXPECT_NEAR(a.m21, b.m21, tol);
  EXPECT_NEAR(a.m22, b.m22, tol);
}

// Potential with v(p) = w1 / 2 + w2 / 2 so that v can be placed exactly.
Potential half_sum() { return Potential::polynomial({0.0, 0.5}, {0.0, 0.5}); }

}  // namespace

TEST(Cocycle, SchrodingerExamples) {
  const auto v = half_sum();
  expect_matrix_near(schrodinger_matrix(v, CocycleParams::from_energy(0.0, 0.0), {0.3, 0.4}),
                     {0.0, -1.0, 1.0, 0.0}, 0.0);
  // v(0.5, 0.5) = 0.5 = t
  expect_matrix_near(schrodinger_matrix(v, CocycleParams::scaled(10.0, 0.5), {0.5, 0.5}),
                     {0.0, -1.0, 1.0, 0.0}, 1e-14);
  expect_matrix_near(schrodinger_matrix(v, CocycleParams::scaled(10.0, 1.0), {0.5, 0.5}),
                     {5.0, -1.0, 1.0, 0.0}, 1e-14);
}

TEST(Cocycle, ConjugateP) {
  expect_matrix_near(conjugate_P(SL2::identity(), 7.0), SL2::identity(), 1e-15);
  const SL2 m{2.0, -1.0, 1.0, 0.0};  // E - lambda v = lambda r with lambda 4, r 0.5
  const SL2 c = conjugate_P(m, 4.0);
  expect_matrix_near(c, {2.0, -0.25, 4.0, 0.0}, 1e-15);
  EXPECT_NEAR(c.det(), 1.0, 1e-15);
}

TEST(Cocycle, ReducedMatrix) {
  const auto map = HyperbolicToralMap::cat();
  const auto v = half_sum();
  const CocycleParams params = CocycleParams::scaled(5.0, 0.5);
  const TorusPoint p{0.5, 0.5};
  const TorusPoint tp = map.apply(p);
  const double r_next = params.t() - v.value(tp);
  const double a = 5.0 * std::sqrt(r_next * r_next + 1.0);
  expect_matrix_near(reduced_matrix(v, params, map, p),
                     SL2::diagonal(a, 1.0 / a) * SL2::rotation(kPi / 2), 1e-13);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto ve = Potential::exponential().normalized();
  for (int i = 0; i < 100; ++i) {
    const SL2 m = reduced_matrix(ve, CocycleParams::scaled(5.0, 3 * u(rng) - 1), map,
                                 {u(rng), u(rng)});
    EXPECT_NEAR(m.det(), 1.0, 1e-12);
  }
}

TEST(Cocycle, GBounds) {
  const auto v = Potential::exponential().normalized();
  double lo = 1e300;
  double hi = 0.0;
  for (double t : {-1.0, 0.5, 2.0}) {
    const AngleKernel k{v, CocycleParams::scaled(10.0, t)};
    for (int i = 0; i <= 64; ++i) {
      for (int j = 0; j <= 64; ++j) {
        const double g = k.g(i / 64.0, j / 64.0);
        lo = std::min(lo, g);
        hi = std::max(hi, g);
      }
    }
  }
  EXPECT_GE(lo, 1.0);
  EXPECT_LE(hi, 10.0);
}

TEST(Cocycle, TransferBasics) {
  const auto map = HyperbolicToralMap::cat();
  const auto v = Potential::exponential().normalized();
  const CocycleParams params = CocycleParams::scaled(10.0, 0.5);
  const TorusPoint p{0.123, 0.456};
  const Transfer t0 = transfer(v, params, map, p, 0);
  EXPECT_DOUBLE_EQ(t0.log_norm(), 0.0);
  expect_matrix_near(t0.matrix(), SL2::identity(), 0.0);
  expect_matrix_near(transfer(v, params, map, p, 1).matrix(), schrodinger_matrix(v, params, p),
                     1e-12);
}

TEST(Cocycle, FreeCaseGrowthRate) {
  const auto map = HyperbolicToralMap::cat();
  const auto v = Potential::constant(0.0);
  const double target = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  double prev = 1e300;
  for (int n : {20, 200, 2000}) {
    const Transfer t = transfer(v, CocycleParams::from_energy(0.0, 3.0), map, {0.1, 0.2}, n);
    const double err = std::abs(t.log_norm() / n - target);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Cocycle, DeterminantOverLongProducts) {
  const auto map = HyperbolicToralMap::cat();
  const auto v = Potential::exponential().normalized();
  for (CocycleKind kind : {CocycleKind::raw, CocycleKind::conjugated, CocycleKind::reduced}) {
    const Transfer t =
        transfer(kind, v, CocycleParams::scaled(100.0, 0.5), map, {0.3, 0.7}, 1000000);
    EXPECT_NEAR(std::exp(t.log_det()), 1.0, 1e-8) << to_string(kind);
  }
}

TEST(Cocycle, CocycleIdentity) {
  const auto map = HyperbolicToralMap::cat();
  const auto v = Potential::exponential().normalized();
  const CocycleParams params = CocycleParams::scaled(10.0, 0.3);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 1000);
    const int n = 1 + static_cast<int>(rng() % 1000);
    const TorusPoint p{u(rng), u(rng)};
    const Transfer whole = transfer(v, params, map, p, m + n);
    const Transfer parts =
        transfer(v, params, map, map.iterate(p, n), m) * transfer(v, params, map, p, n);
    EXPECT_NEAR(parts.log_norm(), whole.log_norm(), 1e-8 * whole.log_norm());
    expect_matrix_near(parts.unit(), whole.unit(), 1e-8);
  }
}

TEST(Cocycle, BackwardTransferInverts) {
  const auto map = HyperbolicToralMap::cat();
  const auto v = Potential::exponential().normalized();
  const CocycleParams params = CocycleParams::scaled(2.0, 0.5);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 1; n <= 8; ++n) {
    const TorusPoint p{u(rng), u(rng)};
    const Transfer fwd = transfer(v, params, map, p, n);
    const Transfer back = transfer(v, params, map, map.iterate(p, n), -n);
    expect_matrix_near((back * fwd).matrix(), SL2::identity(), 1e-8);
  }
}

TEST(Cocycle, PolarFactors) {
  const auto map = HyperbolicToralMap::cat();
  const auto v = Potential::exponential().normalized();
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double lambda = 2.0 + 98.0 * u(rng);
    const CocycleParams params = CocycleParams::scaled(lambda, 3 * u(rng) - 1);
    const TorusPoint p{u(rng), u(rng)};
    const PolarFactors here = polar_factors(v, params, p, map);
    const PolarFactors next = polar_factors(v, params, map.apply(p), map);
    const SL2 s_here = here.S1 * here.S2;
    const SL2 s_next = next.S1 * next.S2;
    expect_matrix_near(s_next * next.Lambda * here.O * s_here.inverse(), next.M,
                       1e-10 * next.M.frobenius());
    expect_matrix_near(here.O.transpose() * here.O, SL2::identity(), 1e-10);
    // Gram eigenvalue formula, independent of the factorization
    const double f2 = here.M.frobenius() * here.M.frobenius();
    const double d = here.M.det();
    const double sigma = std::sqrt((f2 + std::sqrt(f2 * f2 - 4 * d * d)) / 2);
    EXPECT_NEAR(here.Lambda.m11, sigma, 1e-10 * sigma);
    EXPECT_NEAR(here.Lambda.m11, lambda * std::sqrt(here.beta_app / 2), 1e-10 * sigma);
    EXPECT_NEAR(here.O11, here.O.m11, 1e-9);
  }
}

TEST(Cocycle, O11ConvergesQuadratically) {
  const auto map = HyperbolicToralMap::cat();
  const auto v = Potential::exponential().normalized();
  const TorusPoint p{0.31, 0.47};
  std::vector<double> errs;
  for (double lambda : {10.0, 20.0, 40.0}) {
    const PolarFactors pf = polar_factors(v, CocycleParams::scaled(lambda, 0.8), p, map);
    errs.push_back(std::abs(pf.O11 - o11_limit(pf.r)));
  }
  EXPECT_NEAR(errs[0] / errs[1], 4.0, 0.6);
  EXPECT_NEAR(errs[1] / errs[2], 4.0, 0.6);
}
