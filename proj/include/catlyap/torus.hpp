#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace catlyap {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Reduces x into [0, 1). Exact integers map to 0.
inline double wrap_unit(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

/// A phase on the torus, always the representative in the half-open square [0,1)^2.
struct TorusPoint {
  double w1 = 0.0;
  double w2 = 0.0;

  static TorusPoint canonical(double a, double b) { return {wrap_unit(a), wrap_unit(b)}; }
  Vec2 vec() const { return {w1, w2}; }
};

inline bool operator==(const TorusPoint& a, const TorusPoint& b) {
  return a.w1 == b.w1 && a.w2 == b.w2;
}

using IntMatrix = std::array<std::int64_t, 4>;  // row-major [a b; c d]

/// Hyperbolic element of SL(2,Z) acting on the torus.
///
/// `eigenvalue()` is the signed eigenvalue of modulus > 1; `expansion()` is its
/// modulus. The unstable eigenvector keeps its second component equal to 1 and is
/// deliberately not unit length: directional derivatives along it use this scaling.
class HyperbolicToralMap {
 public:
  /// Throws NotHyperbolic if |a + d| <= 2 (checked first), NotUnimodular if ad - bc != 1.
  static HyperbolicToralMap make(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d);
  /// Arnold's cat map [2 1; 1 1].
  static HyperbolicToralMap cat();

  std::int64_t a() const { return m_[0]; }
  std::int64_t b() const { return m_[1]; }
  std::int64_t c() const { return m_[2]; }
  std::int64_t d() const { return m_[3]; }
  const IntMatrix& matrix() const { return m_; }
  std::int64_t trace() const { return m_[0] + m_[3]; }
  std::int64_t determinant() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

  double eigenvalue() const { return eigenvalue_; }
  double expansion() const { return std::abs(eigenvalue_); }
  /// Sign of the expanding eigenvalue (+1 or -1).
  int orientation() const { return eigenvalue_ > 0 ? 1 : -1; }
  Vec2 unstable() const { return unstable_; }
  Vec2 unstable_unit() const { return (1.0 / norm(unstable_)) * unstable_; }

  /// Linear action on R^2 without reduction.
  Vec2 linear(Vec2 p) const;
  TorusPoint apply(TorusPoint p) const;
  TorusPoint apply_inverse(TorusPoint p) const;
  /// (p, Tp, ..., T^n p).
  std::vector<TorusPoint> orbit(TorusPoint p, int n) const;
  /// T^n p via repeated application.
  TorusPoint iterate(TorusPoint p, int n) const;
  /// Integer matrix power M^n, n >= 0. Throws OutOfRange on int64 overflow.
  IntMatrix power(int n) const;

 private:
  HyperbolicToralMap(IntMatrix m, double eigenvalue, Vec2 unstable)
      : m_(m), eigenvalue_(eigenvalue), unstable_(unstable) {}

  IntMatrix m_;
  double eigenvalue_;
  Vec2 unstable_;
};

}  // namespace catlyap
