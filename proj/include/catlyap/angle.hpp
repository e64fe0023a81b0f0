#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "catlyap/cocycle.hpp"
#include "catlyap/leaves.hpp"
#include "catlyap/potential.hpp"

namespace catlyap {

inline constexpr double kPi = 3.141592653589793;
inline constexpr double kHalfPi = 1.5707963267948966;

/// Angle data of the reduced cocycle: r = t - v, g = r^2 + 1, theta = arccot(r).
struct AngleKernel {
  Potential potential;
  CocycleParams params;

  double r(double w1, double w2) const { return params.t() - potential.value(w1, w2); }
  double g(double w1, double w2) const {
    const double x = r(w1, w2);
    return x * x + 1.0;
  }
  double theta(double w1, double w2) const { return arccot(r(w1, w2)); }
  double theta(TorusPoint p) const { return theta(p.w1, p.w2); }
};

/// Lift of arccot(lambda^2 g cot(theta_prev)) in the same half-turn as theta_prev:
/// the diagonal factor fixes every multiple of pi/2, so the quadrant is kept.
double lift_phi(double lambda, double g_next, double theta_prev);

struct AngleStep {
  double phi = 0.0;
  double theta_next = 0.0;
};

/// One recursion step: phi from the previous lift and g at the next image point,
/// then theta_next = phi + theta(p_next).
AngleStep step(const AngleKernel& kernel, double theta_prev, TorusPoint p_next);

/// Distance from x to the nearest multiple of pi.
double rp1_distance(double x);

/// A continuity piece of theta_n along a leaf: [s_begin, s_end) with, for each
/// k <= n, the integer translate that brings T^k of the piece back to the square.
struct LeafPiece {
  double s_begin = 0.0;
  double s_end = 0.0;
  std::vector<std::array<double, 2>> offsets;
};

/// theta_0..theta_n as continuous real lifts along one leaf, piece by piece.
class LeafAngleField {
 public:
  LeafAngleField(AngleKernel kernel, const HyperbolicToralMap& map, const Leaf& leaf, int n);

  int n() const { return images_.n(); }
  const Leaf& leaf() const { return images_.leaf(); }
  const AngleKernel& kernel() const { return kernel_; }
  const LeafImages& images() const { return images_; }
  const std::vector<LeafPiece>& pieces() const { return pieces_; }
  /// The accumulated discontinuity set D_n.
  const std::vector<double>& discontinuities() const { return cuts_; }

  std::size_t piece_of(double s) const;
  /// theta_0..theta_n at s, continued from the piece's interior (so s = s_end
  /// gives the left limit).
  void thetas(const LeafPiece& piece, double s, std::span<double> out) const;
  double theta(const LeafPiece& piece, double s, int j) const;

  /// Integer translates at s computed by flooring; equal offsets at two
  /// parameters mean no discontinuity of theta_n lies between them.
  std::vector<std::array<double, 2>> offsets_at(double s) const;
  void thetas_with(const std::vector<std::array<double, 2>>& offsets, double s,
                   std::span<double> out) const;

 private:
  AngleKernel kernel_;
  LeafImages images_;
  std::vector<double> cuts_;
  std::vector<LeafPiece> pieces_;
};

struct PieceSamples {
  double s_begin = 0.0;
  double s_end = 0.0;
  std::vector<double> s;     // includes s_begin and s_end (left limit)
  std::vector<double> lift;
};

struct AngleOrbit {
  Leaf leaf;
  int n = 0;
  int j = 0;  // which theta_j was sampled (j <= n)
  std::vector<PieceSamples> pieces;
  std::vector<double> branch_jumps;  // D_n
  /// Adjacent samples left more than pi/4 apart because the gap could not be
  /// split in double precision (nested near-vertical ramps).
  int steep_pairs = 0;

  /// All (s, lift) pairs in increasing s.
  std::vector<std::pair<double, double>> samples() const;
  /// True when every piece's lift is non-decreasing up to `tol`.
  bool monotone(double tol = 1e-9) const;
  /// Largest drop of the lift between adjacent samples inside one piece.
  double worst_decrease() const;
};

/// Samples theta_j (default j = n) at `resolution` uniform parameters plus both
/// ends of every continuity piece, then bisects until adjacent lifts differ by
/// less than pi/4 or the gap is below double resolution. Throws
/// ResolutionExhausted on a non-finite lift or when the sample budget runs out.
AngleOrbit orbit_along_leaf(const LeafAngleField& field, int resolution, int j = -1);
AngleOrbit orbit_along_leaf(const AngleKernel& kernel, const HyperbolicToralMap& map,
                            const Leaf& leaf, int n, int resolution);

/// Central difference of the theta_n lift along the leaf. The field overload is
/// per unit arclength; the kernel overload is scaled to the unnormalized
/// unstable vector. Throws StraddlesDiscontinuity if s - h and s + h are not
/// in the same continuity piece.
double directional_derivative_theta(const LeafAngleField& field, double s, double h);
double directional_derivative_theta(const AngleKernel& kernel, const HyperbolicToralMap& map,
                                     const Leaf& leaf, double s, int n, double h);
/// min(1e-6, gap to the nearest discontinuity / 4); 0 on a discontinuity.
double default_fd_step(const LeafAngleField& field, double s);

/// Number of parameters where the lift passes through pi/2 + pi Z.
int critical_census(const AngleOrbit& orbit);
int critical_census(const AngleKernel& kernel, const HyperbolicToralMap& map, const Leaf& leaf,
                    int n, int resolution = 4096);

/// sum_{j=0}^{m} expansion^(j+1).
double geometric_bound(double expansion, int m);

struct BadSetEstimate {
  int n = 0;
  double z = 0.0;
  double delta = 0.0;
  double measure = 0.0;
  int crossing_count = 0;
};

/// Arclength measure of {s : ||theta_n(s) - pi/2||_RP1 < delta}.
BadSetEstimate bad_set_measure(const LeafAngleField& field, const AngleOrbit& orbit,
                               double delta);
BadSetEstimate bad_set_measure(const AngleKernel& kernel, const HyperbolicToralMap& map,
                               const Leaf& leaf, int n, double delta, int resolution = 4096);

/// Sum over critical points of 2 / |slope|: the small-delta limit of measure / delta.
double bad_set_linear_coefficient(const LeafAngleField& field, const AngleOrbit& orbit);

/// Integral of log|cos theta_j| over the leaf (arclength, not normalized).
/// Log singularities at critical points are subtracted analytically.
double log_cos_integral(const LeafAngleField& field, int j, int resolution, double tol = 1e-8);

}  // namespace catlyap
