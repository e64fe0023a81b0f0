#include "catlyap/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "catlyap/errors.hpp"

namespace catlyap {

std::string_view to_string(PotentialFamily f) {
  switch (f) {
    case PotentialFamily::polynomial:
      return "polynomial";
    case PotentialFamily::exponential:
      return "exponential";
    case PotentialFamily::logarithm:
      return "logarithm";
    case PotentialFamily::custom:
      return "custom";
  }
  return "unknown";
}

namespace {

double horner(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
  return s;
}

double horner_derivative(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) s = s * x + static_cast<double>(k) * c[k];
  return s;
}

}  // namespace

Potential Potential::polynomial(std::vector<double> a, std::vector<double> b) {
  Potential v;
  v.family_ = PotentialFamily::polynomial;
  double sup = 0.0;
  for (double x : a) sup += std::abs(x);
  for (double x : b) sup += std::abs(x);
  v.a_ = std::move(a);
  v.b_ = std::move(b);
  v.raw_sup_ = sup;
  v.label_ = "polynomial";
  return v;
}

Potential Potential::exponential() {
  Potential v;
  v.family_ = PotentialFamily::exponential;
  v.raw_sup_ = std::exp(2.0);
  v.label_ = "exponential";
  return v;
}

Potential Potential::logarithm() {
  Potential v;
  v.family_ = PotentialFamily::logarithm;
  v.raw_sup_ = std::log(3.0);
  v.label_ = "logarithm";
  return v;
}

Potential Potential::custom(Function f, double sup_norm, std::string label) {
  Potential v;
  v.family_ = PotentialFamily::custom;
  v.custom_ = std::make_shared<const Function>(std::move(f));
  v.raw_sup_ = sup_norm;
  v.label_ = std::move(label);
  return v;
}

double Potential::value(double w1, double w2) const {
  switch (family_) {
    case PotentialFamily::polynomial:
      return scale_ * (horner(a_, w1) + horner(b_, w2));
    case PotentialFamily::exponential:
      return scale_ * std::exp(w1 + w2);
    case PotentialFamily::logarithm:
      return scale_ * std::log1p(w1 + w2);
    case PotentialFamily::custom:
      return scale_ * (*custom_)(w1, w2);
  }
  return 0.0;
}

Vec2 Potential::gradient(double w1, double w2) const {
  switch (family_) {
    case PotentialFamily::polynomial:
      return {scale_ * horner_derivative(a_, w1), scale_ * horner_derivative(b_, w2)};
    case PotentialFamily::exponential: {
      const double e = scale_ * std::exp(w1 + w2);
      return {e, e};
    }
    case PotentialFamily::logarithm: {
      const double g = scale_ / (1.0 + w1 + w2);
      return {g, g};
    }
    case PotentialFamily::custom: {
      // Keep both stencil points inside the closed square.
      const double h = kPotentialFdStep;
      const double x = std::clamp(w1, h, 1.0 - h);
      const double y = std::clamp(w2, h, 1.0 - h);
      const Function& f = *custom_;
      return {scale_ * (f(x + h, y) - f(x - h, y)) / (2.0 * h),
              scale_ * (f(x, y + h) - f(x, y - h)) / (2.0 * h)};
    }
  }
  return {};
}

double Potential::directional_derivative(const HyperbolicToralMap& map, TorusPoint p) const {
  return dot(gradient(p), map.unstable());
}

Potential Potential::scaled(double factor) const {
  Potential v = *this;
  v.scale_ *= factor;
  return v;
}

Potential Potential::normalized() const {
  const double s = sup_norm();
  if (!(s > 1.0)) return *this;
  return scaled(1.0 / s);
}

PotentialCertificate certify(const Potential& v, const HyperbolicToralMap& map, int grid) {
  if (grid < 2) throw OutOfRange("certify requires grid >= 2");
  double sup = 0.0;
  double floor = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const TorusPoint p{static_cast<double>(i) / grid, static_cast<double>(j) / grid};
      sup = std::max(sup, std::abs(v.value(p)));
      floor = std::min(floor, v.directional_derivative(map, p));
    }
  }
  if (!(floor > 0.0)) {
    throw NotMonotoneAlongUnstable("measured directional-derivative floor " +
                                   std::to_string(floor) + " is not positive for potential '" +
                                   v.label() + "'");
  }
  return {sup, floor};
}

}  // namespace catlyap
