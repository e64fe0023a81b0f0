#include "catlyap/leaves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "catlyap/errors.hpp"

namespace catlyap {

namespace {

constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2;

Vec2 positive_direction(const HyperbolicToralMap& map) {
  const Vec2 u = map.unstable_unit();
  if (!(u.x > 0.0 && u.y > 0.0)) {
    throw UnsupportedGeometry(
        "leaf parametrization by the anti-diagonal needs an unstable direction of positive slope");
  }
  return u;
}

double clamp_unit(double x) { return std::clamp(x, 0.0, kBelowOne); }

void axis_crossings(double b, double d, double len, std::vector<double>& out) {
  if (d > 0.0) {
    for (double k = std::floor(b) + 1.0;; k += 1.0) {
      const double s = (k - b) / d;
      if (s >= len - kCrossingTol) break;
      if (s > kCrossingTol) out.push_back(s);
    }
  } else if (d < 0.0) {
    for (double k = std::ceil(b) - 1.0;; k -= 1.0) {
      const double s = (k - b) / d;
      if (s >= len - kCrossingTol) break;
      if (s > kCrossingTol) out.push_back(s);
    }
  }
}

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  out.reserve(v.size());
  for (double s : v) {
    if (out.empty() || s - out.back() > kCrossingTol) out.push_back(s);
  }
  v = std::move(out);
}

}  // namespace

double max_leaf_length(const HyperbolicToralMap& map) {
  const Vec2 u = positive_direction(map);
  return 1.0 / std::max(u.x, u.y);
}

double fubini_jacobian(const HyperbolicToralMap& map) {
  const Vec2 u = positive_direction(map);
  return (u.x + u.y) / kSqrt2;
}

Leaf leaf_from_z(const HyperbolicToralMap& map, double z) {
  if (!(z > 0.0 && z < kSqrt2)) throw OutOfRange("leaf coordinate z must lie in (0, sqrt 2)");
  const Vec2 u = positive_direction(map);
  Leaf leaf;
  leaf.z = z;
  leaf.direction = u;
  const double a1 = z / kSqrt2;
  const double a2 = 1.0 - a1;
  leaf.anchor = {a1, a2};

  const double back_x = a1 / u.x;
  const double back_y = a2 / u.y;
  const double fwd = std::min((1.0 - a1) / u.x, (1.0 - a2) / u.y);
  if (back_x <= back_y) {
    leaf.anchor_param = back_x;
    leaf.start = {0.0, clamp_unit(a2 - back_x * u.y)};
  } else {
    leaf.anchor_param = back_y;
    leaf.start = {clamp_unit(a1 - back_y * u.x), 0.0};
  }
  leaf.length = leaf.anchor_param + fwd;
  return leaf;
}

TorusPoint leaf_point(const Leaf& leaf, double s) {
  if (!(s >= 0.0 && s < leaf.length)) throw OutOfRange("leaf parameter outside [0, length)");
  return {clamp_unit(leaf.start.w1 + s * leaf.direction.x),
          clamp_unit(leaf.start.w2 + s * leaf.direction.y)};
}

std::pair<Leaf, double> leaf_of_point(const HyperbolicToralMap& map, TorusPoint p) {
  const Vec2 u = positive_direction(map);
  // w1 + w2 increases at rate u.x + u.y along the leaf; solve for the anti-diagonal.
  const double to_anchor = (1.0 - p.w1 - p.w2) / (u.x + u.y);
  const double a1 = p.w1 + to_anchor * u.x;
  const double z = std::clamp(a1 * kSqrt2, std::numeric_limits<double>::min(),
                              kSqrt2 * kBelowOne);
  Leaf leaf = leaf_from_z(map, z);
  double s = leaf.anchor_param - to_anchor;
  s = std::clamp(s, 0.0, std::nextafter(leaf.length, 0.0));
  return {leaf, s};
}

LeafImages::LeafImages(const HyperbolicToralMap& map, const Leaf& leaf, int n)
    : leaf_(leaf), n_(n) {
  if (n < 0) throw OutOfRange("leaf image depth must be >= 0");
  base_.reserve(static_cast<std::size_t>(n) + 1);
  dir_.reserve(static_cast<std::size_t>(n) + 1);
  const double mu = map.eigenvalue();
  double stretch = 1.0;
  for (int k = 0; k <= n; ++k) {
    const IntMatrix m = map.power(k);
    base_.push_back({static_cast<double>(m[0]) * leaf.start.w1 +
                         static_cast<double>(m[1]) * leaf.start.w2,
                     static_cast<double>(m[2]) * leaf.start.w1 +
                         static_cast<double>(m[3]) * leaf.start.w2});
    dir_.push_back(stretch * leaf.direction);
    stretch *= mu;
  }
}

std::vector<double> LeafImages::crossings(int k) const {
  std::vector<double> out;
  const Vec2 b = base(k);
  const Vec2 d = dir(k);
  axis_crossings(b.x, d.x, leaf_.length, out);
  axis_crossings(b.y, d.y, leaf_.length, out);
  sort_unique(out);
  return out;
}

std::vector<double> LeafImages::accumulated(int k) const {
  std::vector<double> out;
  for (int j = 0; j <= k; ++j) {
    const auto c = crossings(j);
    out.insert(out.end(), c.begin(), c.end());
  }
  sort_unique(out);
  return out;
}

CrossingCensus image_crossings(const HyperbolicToralMap& map, const Leaf& leaf, int n) {
  const LeafImages images(map, leaf, n);
  CrossingCensus c;
  c.n = n;
  c.z = leaf.z;
  c.crossings = images.crossings(n);
  c.count = static_cast<int>(c.crossings.size());
  return c;
}

double crossing_count_bound(const HyperbolicToralMap& map, const Leaf& leaf, int n) {
  return 2.0 * leaf.length * std::pow(map.expansion(), n) + 2.0;
}

std::vector<ImagePiece> image_decomposition(const HyperbolicToralMap& map, const Leaf& leaf,
                                            int n) {
  const LeafImages images(map, leaf, n);
  std::vector<double> cuts{0.0};
  const auto cr = images.crossings(n);
  cuts.insert(cuts.end(), cr.begin(), cr.end());
  cuts.push_back(leaf.length);

  const double speed = std::pow(map.expansion(), n);
  const int orientation = (n % 2 != 0 && map.orientation() < 0) ? -1 : 1;

  std::vector<ImagePiece> pieces;
  pieces.reserve(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    ImagePiece piece;
    piece.s_begin = cuts[i];
    piece.s_end = cuts[i + 1];
    const double mid = 0.5 * (piece.s_begin + piece.s_end);
    const Vec2 q = images.point(n, mid);
    auto [target, t_mid] = leaf_of_point(map, TorusPoint::canonical(q.x, q.y));
    const double ta = t_mid + orientation * speed * (piece.s_begin - mid);
    const double tb = t_mid + orientation * speed * (piece.s_end - mid);
    piece.target = target;
    piece.target_begin = std::clamp(std::min(ta, tb), 0.0, target.length);
    piece.target_end = std::clamp(std::max(ta, tb), 0.0, target.length);
    piece.orientation = orientation;
    pieces.push_back(piece);
  }
  return pieces;
}

}  // namespace catlyap
