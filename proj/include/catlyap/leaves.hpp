#pragma once

#include <utility>
#include <vector>

#include "catlyap/torus.hpp"

namespace catlyap {

/// A local unstable leaf: the maximal unstable-direction chord of [0,1)^2
/// through the anti-diagonal point at arclength z from (0,1). Parametrized by
/// arclength s in [0, length); the start point is included, the end excluded.
struct Leaf {
  double z = 0.0;
  TorusPoint anchor;       // intersection with {w1 + w2 = 1}
  TorusPoint start;        // included endpoint on the square's boundary
  double length = 0.0;
  Vec2 direction;          // unit unstable direction
  double anchor_param = 0.0;  // s at which the leaf meets the anti-diagonal
};

inline constexpr double kSqrt2 = 1.4142135623730951;

/// Largest possible leaf length for this map: 1 / max(unit direction components).
double max_leaf_length(const HyperbolicToralMap& map);

/// Throws OutOfRange for z outside (0, sqrt 2), UnsupportedGeometry when the
/// unstable direction does not have positive slope.
Leaf leaf_from_z(const HyperbolicToralMap& map, double z);

/// start + s * direction. Throws OutOfRange unless 0 <= s < length.
TorusPoint leaf_point(const Leaf& leaf, double s);

/// The unique leaf through p and p's parameter on it.
std::pair<Leaf, double> leaf_of_point(const HyperbolicToralMap& map, TorusPoint p);

/// Area element of the (z, s) coordinates: dA = fubini_jacobian * dz ds.
double fubini_jacobian(const HyperbolicToralMap& map);

/// The affine images T^k(start + s u_hat) = base(k) + s dir(k) in R^2 for
/// k = 0..n, without reduction mod Z^2.
class LeafImages {
 public:
  LeafImages(const HyperbolicToralMap& map, const Leaf& leaf, int n);

  int n() const { return n_; }
  const Leaf& leaf() const { return leaf_; }
  Vec2 base(int k) const { return base_[static_cast<std::size_t>(k)]; }
  Vec2 dir(int k) const { return dir_[static_cast<std::size_t>(k)]; }
  Vec2 point(int k, double s) const { return base(k) + s * dir(k); }

  /// Parameters s in (0, length) where T^k of the leaf point has an integer
  /// coordinate, sorted, with simultaneous x/y hits (corners) counted once.
  std::vector<double> crossings(int k) const;
  /// Union of crossings(j) for j <= k.
  std::vector<double> accumulated(int k) const;

 private:
  Leaf leaf_;
  int n_;
  std::vector<Vec2> base_;
  std::vector<Vec2> dir_;
};

/// Coincidence tolerance for crossing parameters.
inline constexpr double kCrossingTol = 1e-12;

struct CrossingCensus {
  int n = 0;
  double z = 0.0;
  std::vector<double> crossings;
  int count = 0;
};

CrossingCensus image_crossings(const HyperbolicToralMap& map, const Leaf& leaf, int n);

/// Upper bound 2 l_z expansion^n + 2 on the crossing count.
double crossing_count_bound(const HyperbolicToralMap& map, const Leaf& leaf, int n);

struct ImagePiece {
  double s_begin = 0.0;
  double s_end = 0.0;
  Leaf target;
  double target_begin = 0.0;  // covered sub-interval of the target leaf
  double target_end = 0.0;
  int orientation = 1;  // +1 if s increases along the target, -1 otherwise
};

/// Cuts [0, length) at the n-th image crossings; each piece maps affinely onto
/// a sub-segment of one target leaf.
std::vector<ImagePiece> image_decomposition(const HyperbolicToralMap& map, const Leaf& leaf,
                                            int n);

}  // namespace catlyap
