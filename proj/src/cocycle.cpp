#include "catlyap/cocycle.hpp"

#include <algorithm>
#include <cmath>

#include "catlyap/errors.hpp"

namespace catlyap {

SL2 SL2::rotation(double gamma) {
  const double c = std::cos(gamma);
  const double s = std::sin(gamma);
  return {c, -s, s, c};
}

SL2 SL2::inverse() const {
  const double d = det();
  return {m22 / d, -m12 / d, -m21 / d, m11 / d};
}

double SL2::frobenius() const { return std::sqrt(m11 * m11 + m12 * m12 + m21 * m21 + m22 * m22); }

double SL2::norm() const {
  // Largest eigenvalue of M^T M from its trace F = ||M||_F^2 and determinant det(M)^2.
  const double f = m11 * m11 + m12 * m12 + m21 * m21 + m22 * m22;
  const double d = std::abs(det());
  const double disc = std::max(0.0, (f - 2.0 * d) * (f + 2.0 * d));
  return std::sqrt(0.5 * (f + std::sqrt(disc)));
}

double SL2::max_abs_diff(const SL2& o) const {
  return std::max({std::abs(m11 - o.m11), std::abs(m12 - o.m12), std::abs(m21 - o.m21),
                   std::abs(m22 - o.m22)});
}

SL2 operator*(const SL2& a, const SL2& b) {
  return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
          a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

SL2 operator*(double s, const SL2& a) { return {s * a.m11, s * a.m12, s * a.m21, s * a.m22}; }

CocycleParams CocycleParams::scaled(double lambda, double t) {
  if (!(lambda > 0.0)) throw OutOfRange("coupling lambda must be > 0");
  return {lambda, lambda * t};
}

CocycleParams CocycleParams::from_energy(double lambda, double energy) {
  if (!(lambda >= 0.0)) throw OutOfRange("coupling lambda must be >= 0");
  return {lambda, energy};
}

std::string_view to_string(CocycleKind k) {
  switch (k) {
    case CocycleKind::raw:
      return "raw";
    case CocycleKind::conjugated:
      return "conjugated";
    case CocycleKind::reduced:
      return "reduced";
  }
  return "unknown";
}

SL2 schrodinger_matrix(const Potential& v, const CocycleParams& params, TorusPoint p) {
  return {params.energy - params.lambda * v.value(p), -1.0, 1.0, 0.0};
}

SL2 conjugate_P(const SL2& m, double lambda) {
  if (!(lambda > 0.0)) throw OutOfRange("conjugation requires lambda > 0");
  return {m.m11, m.m12 / lambda, lambda * m.m21, m.m22};
}

SL2 reduced_matrix(const Potential& v, const CocycleParams& params,
                   const HyperbolicToralMap& map, TorusPoint p) {
  const double t = params.t();
  const double r = t - v.value(p);
  const double rn = t - v.value(map.apply(p));
  const double amp = params.lambda * std::sqrt(rn * rn + 1.0);
  // R_theta with theta = arccot(r): cos = r / sqrt(g), sin = 1 / sqrt(g).
  const double inv = 1.0 / std::sqrt(r * r + 1.0);
  const double c = r * inv;
  const double s = inv;
  return {amp * c, -amp * s, s / amp, c / amp};
}

SL2 cocycle_matrix(CocycleKind kind, const Potential& v, const CocycleParams& params,
                   const HyperbolicToralMap& map, TorusPoint p) {
  switch (kind) {
    case CocycleKind::raw:
      return schrodinger_matrix(v, params, p);
    case CocycleKind::conjugated:
      return conjugate_P(schrodinger_matrix(v, params, p), params.lambda);
    case CocycleKind::reduced:
      return reduced_matrix(v, params, map, p);
  }
  return SL2::identity();
}

// ---------------------------------------------------------------------------
// Transfer

Transfer Transfer::of(const SL2& m) {
  Transfer t;
  t.left_multiply(m);
  return t;
}

void Transfer::left_multiply(const SL2& m) {
  const SL2 c = m * q_;
  const double rho = std::hypot(c.m11, c.m21);
  const double cs = c.m11 / rho;
  const double sn = c.m21 / rho;
  const double r12 = cs * c.m12 + sn * c.m22;
  const double r22 = m.det() / rho;
  q_ = {cs, -sn, sn, cs};
  shear_ += (r12 / rho) * std::exp(log_b_ - log_a_);
  log_a_ += std::log(rho);
  log_b_ += std::log(std::abs(r22));
}

namespace {

// Norm of [[1, x], [0, eps]].
double upper_norm(double x, double eps) {
  const double f = 1.0 + x * x + eps * eps;
  const double disc = std::max(0.0, f * f - 4.0 * eps * eps);
  return std::sqrt(0.5 * (f + std::sqrt(disc)));
}

}  // namespace

double Transfer::log_norm() const {
  return log_a_ + std::log(upper_norm(shear_, std::exp(log_b_ - log_a_)));
}

SL2 Transfer::unit() const {
  const double eps = std::exp(log_b_ - log_a_);
  const double s = 1.0 / upper_norm(shear_, eps);
  return s * (q_ * SL2{1.0, shear_, 0.0, eps});
}

SL2 Transfer::matrix() const {
  const double eps = std::exp(log_b_ - log_a_);
  return std::exp(log_a_) * (q_ * SL2{1.0, shear_, 0.0, eps});
}

Transfer operator*(const Transfer& lhs, const Transfer& rhs) {
  const double eps1 = std::exp(lhs.log_b_ - lhs.log_a_);
  const SL2 c = SL2{1.0, lhs.shear_, 0.0, eps1} * rhs.q_;
  const double rho = std::hypot(c.m11, c.m21);
  const double cs = c.m11 / rho;
  const double sn = c.m21 / rho;
  const double r12 = cs * c.m12 + sn * c.m22;

  Transfer out;
  out.q_ = lhs.q_ * SL2{cs, -sn, sn, cs};
  out.log_a_ = lhs.log_a_ + std::log(rho) + rhs.log_a_;
  out.log_b_ = lhs.log_b_ + rhs.log_b_ - std::log(rho);
  out.shear_ = rhs.shear_ + (r12 / rho) * std::exp(rhs.log_b_ - rhs.log_a_);
  return out;
}

Transfer transfer(CocycleKind kind, const Potential& v, const CocycleParams& params,
                  const HyperbolicToralMap& map, TorusPoint p, int n) {
  Transfer t;
  if (n > 0) {
    for (int k = 0; k < n; ++k) {
      t.left_multiply(cocycle_matrix(kind, v, params, map, p));
      p = map.apply(p);
    }
  } else if (n < 0) {
    for (int k = 0; k < -n; ++k) {
      p = map.apply_inverse(p);
      t.left_multiply(cocycle_matrix(kind, v, params, map, p).inverse());
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Polar factors

namespace {

struct PolarScalars {
  double r;
  double beta;
  double f;
  SL2 S2;
};

PolarScalars polar_scalars(double r, double lambda) {
  const double l2 = lambda * lambda;
  const double l4 = l2 * l2;
  const double q = r * r + 1.0 + 1.0 / l4;
  const double beta = q + std::sqrt(q * q - 4.0 / l4);
  const double diag = beta - 2.0 / l4;
  const double off = 2.0 * r / l2;
  const double f = 1.0 / std::hypot(diag, off);
  return {r, beta, f, SL2{f * diag, f * off, -f * off, f * diag}};
}

}  // namespace

PolarFactors polar_factors(const Potential& v, const CocycleParams& params, TorusPoint p,
                           const HyperbolicToralMap& map) {
  const double lambda = params.lambda;
  const double t = params.t();
  const PolarScalars here = polar_scalars(t - v.value(p), lambda);
  const PolarScalars next = polar_scalars(t - v.value(map.apply(p)), lambda);

  PolarFactors out;
  out.r = here.r;
  out.beta_app = here.beta;
  out.alpha_sv = 0.5 * lambda * lambda * here.beta;
  out.f = here.f;
  out.M = SL2{lambda * here.r, -1.0 / lambda, lambda, 0.0};

  const double nrm = lambda * std::sqrt(0.5 * here.beta);
  if (std::abs(nrm - 1.0) < 1e-12) {
    throw DegenerateRotation("conjugated cocycle matrix is orthogonal; polar factors are not unique");
  }
  out.Lambda = SL2::diagonal(nrm, 1.0 / nrm);
  out.S2 = here.S2;
  // S1 = M (S2 Lambda S2^T)^-1 = M S2 Lambda^-1 S2^T.
  out.S1 = out.M * (here.S2 * SL2::diagonal(1.0 / nrm, nrm) * here.S2.transpose());
  out.O = next.S2.transpose() * out.S1 * here.S2;

  const double l2 = lambda * lambda;
  const double l4 = l2 * l2;
  const double l6 = l4 * l2;
  out.kappa = std::sqrt(2.0 / here.beta) * next.beta * here.beta * next.f * here.f;
  out.O11 = out.kappa * (here.r - 2.0 * here.r / (l4 * next.beta) -
                         2.0 * next.r / (l2 * next.beta) +
                         4.0 * next.r / (l6 * next.beta * here.beta));
  return out;
}

}  // namespace catlyap
