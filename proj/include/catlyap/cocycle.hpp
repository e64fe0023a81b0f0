#pragma once

#include <string_view>

#include "catlyap/potential.hpp"
#include "catlyap/torus.hpp"

namespace catlyap {

/// Real 2x2 matrix; used for SL(2,R) elements and their orthogonal factors.
struct SL2 {
  double m11 = 1.0;
  double m12 = 0.0;
  double m21 = 0.0;
  double m22 = 1.0;

  static SL2 identity() { return {}; }
  static SL2 diagonal(double a, double d) { return {a, 0.0, 0.0, d}; }
  /// R_gamma = [cos -sin; sin cos].
  static SL2 rotation(double gamma);

  double det() const { return m11 * m22 - m12 * m21; }
  double trace() const { return m11 + m22; }
  SL2 transpose() const { return {m11, m21, m12, m22}; }
  /// Adjugate divided by the determinant.
  SL2 inverse() const;
  Vec2 apply(Vec2 x) const { return {m11 * x.x + m12 * x.y, m21 * x.x + m22 * x.y}; }
  /// Largest singular value.
  double norm() const;
  double frobenius() const;
  double max_abs_diff(const SL2& o) const;
};

SL2 operator*(const SL2& a, const SL2& b);
SL2 operator*(double s, const SL2& a);

/// Coupling lambda and energy E; the scaled energy is t = E / lambda.
struct CocycleParams {
  double lambda = 1.0;
  double energy = 0.0;

  /// lambda > 0. t is not range-checked here; see `in_scaled_interval`.
  static CocycleParams scaled(double lambda, double t);
  /// lambda >= 0; lambda = 0 is the free cocycle.
  static CocycleParams from_energy(double lambda, double energy);

  double t() const { return energy / lambda; }
  bool in_scaled_interval() const { return lambda > 0 && t() >= -1.0 && t() <= 2.0; }
};

enum class CocycleKind { raw, conjugated, reduced };

std::string_view to_string(CocycleKind k);

/// [[E - lambda v(p), -1], [1, 0]].
SL2 schrodinger_matrix(const Potential& v, const CocycleParams& params, TorusPoint p);

/// P M P^-1 with P = diag(lambda^-1/2, lambda^1/2).
SL2 conjugate_P(const SL2& m, double lambda);

/// diag(lambda sqrt(g(Tp)), 1/(lambda sqrt(g(Tp)))) * R_theta(p), with
/// g = (t - v)^2 + 1 and theta = arccot(t - v) in (0, pi).
SL2 reduced_matrix(const Potential& v, const CocycleParams& params,
                   const HyperbolicToralMap& map, TorusPoint p);

/// One cocycle factor at p for the requested representation.
SL2 cocycle_matrix(CocycleKind kind, const Potential& v, const CocycleParams& params,
                   const HyperbolicToralMap& map, TorusPoint p);

/// arccot with range (0, pi), continuous and decreasing.
inline double arccot(double x) { return 1.5707963267948966 - std::atan(x); }

/// Transfer product kept as Q * diag(e^a, e^b) * [[1, x], [0, 1]] with Q orthogonal.
///
/// The log-magnitudes live outside the floating-point entries, so products of
/// millions of factors neither overflow nor lose the determinant: a + b is the
/// accumulated log|det| of the factors.
class Transfer {
 public:
  static Transfer identity() { return Transfer(); }
  static Transfer of(const SL2& m);

  /// this <- m * this.
  void left_multiply(const SL2& m);

  /// log of the operator norm.
  double log_norm() const;
  /// Accumulated log|det|.
  double log_det() const { return log_a_ + log_b_; }
  /// The matrix divided by its norm.
  SL2 unit() const;
  /// Same as log_norm(); the separate magnitude that goes with unit().
  double log_scale() const { return log_norm(); }
  /// Reconstructs the full matrix; overflows for long products.
  SL2 matrix() const;

  friend Transfer operator*(const Transfer& lhs, const Transfer& rhs);

 private:
  SL2 q_;
  double log_a_ = 0.0;
  double log_b_ = 0.0;
  double shear_ = 0.0;
};

/// n-step transfer matrix following the three-case definition: factors along the
/// forward orbit for n > 0, the identity for n = 0, inverse factors along the
/// backward orbit for n < 0.
Transfer transfer(CocycleKind kind, const Potential& v, const CocycleParams& params,
                  const HyperbolicToralMap& map, TorusPoint p, int n);

inline Transfer transfer(const Potential& v, const CocycleParams& params,
                         const HyperbolicToralMap& map, TorusPoint p, int n) {
  return transfer(CocycleKind::raw, v, params, map, p, n);
}

/// Polar/singular-value factors of the conjugated matrix M = P A P^-1 at a phase.
struct PolarFactors {
  double r = 0.0;         // t - v(p)
  double alpha_sv = 0.0;  // largest eigenvalue of M^T M
  double beta_app = 0.0;  // r^2 + 1 + 1/lambda^4 + sqrt((r^2 + 1 + 1/lambda^4)^2 - 4/lambda^4)
  double f = 0.0;
  SL2 M;       // conjugated matrix at p
  SL2 S1;      // rotation with M = S1 sqrt(M^T M)
  SL2 S2;      // rotation with sqrt(M^T M) = S2 Lambda S2^T
  SL2 Lambda;  // diag(||M||, 1/||M||)
  SL2 O;       // S2(Tp)^T S1(p) S2(p)
  double kappa = 0.0;
  double O11 = 0.0;  // closed-form upper-left entry of O
};

/// Throws DegenerateRotation when M is within 1e-12 of orthogonal.
PolarFactors polar_factors(const Potential& v, const CocycleParams& params, TorusPoint p,
                           const HyperbolicToralMap& map);

/// lambda -> infinity limit of O11: r / sqrt(r^2 + 1).
inline double o11_limit(double r) { return r / std::sqrt(r * r + 1.0); }

}  // namespace catlyap
