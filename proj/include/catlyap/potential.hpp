#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "catlyap/torus.hpp"

namespace catlyap {

enum class PotentialFamily { polynomial, exponential, logarithm, custom };

std::string_view to_string(PotentialFamily f);

/// A potential v on the fundamental domain [0,1)^2, evaluated by its smooth formula.
///
/// Built-in families have analytic gradients:
///   polynomial   v = sum_k a_k w1^k + b_k w2^k
///   exponential  v = exp(w1 + w2)
///   logarithm    v = log(1 + w1 + w2)
/// The custom family wraps an arbitrary callable; its gradient is a central
/// finite difference. Every family carries a multiplicative `scale` so that
/// normalization is exact and cheap.
///
/// The formulas are evaluated at any real argument, so callers tracing a
/// continuous branch past the square's edge get the smooth extension.
class Potential {
 public:
  using Function = std::function<double(double, double)>;

  static Potential polynomial(std::vector<double> a, std::vector<double> b);
  static Potential exponential();
  static Potential logarithm();
  /// `sup_norm` is the caller's bound on |f| over the square.
  static Potential custom(Function f, double sup_norm, std::string label = "custom");
  /// v = const; inadmissible, used as a negative control.
  static Potential constant(double value) { return polynomial({value}, {}); }

  PotentialFamily family() const { return family_; }
  const std::vector<double>& a() const { return a_; }
  const std::vector<double>& b() const { return b_; }
  const std::string& label() const { return label_; }
  double scale() const { return scale_; }
  /// Certified bound on |v| over the square.
  double sup_norm() const { return scale_ * raw_sup_; }

  double value(double w1, double w2) const;
  double value(TorusPoint p) const { return value(p.w1, p.w2); }
  Vec2 gradient(double w1, double w2) const;
  Vec2 gradient(TorusPoint p) const { return gradient(p.w1, p.w2); }
  /// gradient . u with u the map's (unnormalized) unstable vector.
  double directional_derivative(const HyperbolicToralMap& map, TorusPoint p) const;

  /// Scales v by 1/sup_norm when sup_norm > 1; otherwise returns v unchanged.
  Potential normalized() const;
  Potential scaled(double factor) const;

 private:
  Potential() = default;

  PotentialFamily family_ = PotentialFamily::polynomial;
  std::vector<double> a_;
  std::vector<double> b_;
  std::shared_ptr<const Function> custom_;
  std::string label_;
  double scale_ = 1.0;
  double raw_sup_ = 0.0;
};

struct PotentialCertificate {
  double sup_norm_measured = 0.0;
  double deriv_floor_measured = 0.0;
};

/// Grid scan over {i/grid}^2. Throws NotMonotoneAlongUnstable when the smallest
/// directional derivative along the unstable vector is <= 0.
PotentialCertificate certify(const Potential& v, const HyperbolicToralMap& map, int grid);

/// Central finite-difference step used by the custom family.
inline constexpr double kPotentialFdStep = 1e-6;

}  // namespace catlyap
