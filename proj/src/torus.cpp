#include "catlyap/torus.hpp"

#include <string>

#include "catlyap/errors.hpp"

namespace catlyap {

HyperbolicToralMap HyperbolicToralMap::make(std::int64_t a, std::int64_t b, std::int64_t c,
                                            std::int64_t d) {
  // trace first: a matrix with |trace| <= 2 is rejected as non-hyperbolic
  // whatever its determinant
  const std::int64_t tr = a + d;
  if (tr >= -2 && tr <= 2) {
    throw NotHyperbolic("trace " + std::to_string(tr) + " has |trace| <= 2");
  }
  const std::int64_t det = a * d - b * c;
  if (det != 1) {
    throw NotUnimodular("matrix [" + std::to_string(a) + " " + std::to_string(b) + "; " +
                        std::to_string(c) + " " + std::to_string(d) + "] has determinant " +
                        std::to_string(det));
  }
  // Roots of x^2 - tr x + 1 = 0; take the one of modulus > 1.
  const double t = static_cast<double>(tr);
  const double disc = std::sqrt(t * t - 4.0);
  const double mu = tr > 0 ? 0.5 * (t + disc) : 0.5 * (t - disc);

  // Eigenvector (x, 1): (a - mu) x + b = 0, equivalently c x + d = mu. Pick the
  // better-conditioned form.
  const double da = mu - static_cast<double>(a);
  const double dd = mu - static_cast<double>(d);
  double x = 0.0;
  if (std::abs(da) >= std::abs(dd)) {
    x = static_cast<double>(b) / da;
  } else {
    x = dd / static_cast<double>(c);
  }
  return HyperbolicToralMap({a, b, c, d}, mu, {x, 1.0});
}

HyperbolicToralMap HyperbolicToralMap::cat() { return make(2, 1, 1, 1); }

Vec2 HyperbolicToralMap::linear(Vec2 p) const {
  return {static_cast<double>(m_[0]) * p.x + static_cast<double>(m_[1]) * p.y,
          static_cast<double>(m_[2]) * p.x + static_cast<double>(m_[3]) * p.y};
}

TorusPoint HyperbolicToralMap::apply(TorusPoint p) const {
  const Vec2 q = linear(p.vec());
  return TorusPoint::canonical(q.x, q.y);
}

TorusPoint HyperbolicToralMap::apply_inverse(TorusPoint p) const {
  // Inverse of a unimodular matrix is [d -b; -c a].
  const double x = static_cast<double>(m_[3]) * p.w1 - static_cast<double>(m_[1]) * p.w2;
  const double y = -static_cast<double>(m_[2]) * p.w1 + static_cast<double>(m_[0]) * p.w2;
  return TorusPoint::canonical(x, y);
}

std::vector<TorusPoint> HyperbolicToralMap::orbit(TorusPoint p, int n) const {
  std::vector<TorusPoint> out;
  out.reserve(static_cast<std::size_t>(n < 0 ? 1 : n + 1));
  out.push_back(p);
  for (int k = 0; k < n; ++k) {
    p = apply(p);
    out.push_back(p);
  }
  return out;
}

TorusPoint HyperbolicToralMap::iterate(TorusPoint p, int n) const {
  if (n >= 0) {
    for (int k = 0; k < n; ++k) p = apply(p);
  } else {
    for (int k = 0; k < -n; ++k) p = apply_inverse(p);
  }
  return p;
}

namespace {

std::int64_t checked_mul_add(std::int64_t x1, std::int64_t y1, std::int64_t x2, std::int64_t y2) {
  std::int64_t p1 = 0;
  std::int64_t p2 = 0;
  std::int64_t s = 0;
  if (__builtin_mul_overflow(x1, y1, &p1) || __builtin_mul_overflow(x2, y2, &p2) ||
      __builtin_add_overflow(p1, p2, &s)) {
    throw OutOfRange("integer matrix power overflows int64");
  }
  return s;
}

}  // namespace

IntMatrix HyperbolicToralMap::power(int n) const {
  if (n < 0) throw OutOfRange("power requires n >= 0");
  IntMatrix r{1, 0, 0, 1};
  for (int k = 0; k < n; ++k) {
    r = {checked_mul_add(m_[0], r[0], m_[1], r[2]), checked_mul_add(m_[0], r[1], m_[1], r[3]),
         checked_mul_add(m_[2], r[0], m_[3], r[2]), checked_mul_add(m_[2], r[1], m_[3], r[3])};
  }
  return r;
}

}  // namespace catlyap
