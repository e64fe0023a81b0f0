#include "catlyap/angle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "catlyap/errors.hpp"
#include "catlyap/parallel.hpp"

namespace catlyap {

double lift_phi(double lambda, double g_next, double theta_prev) {
  const double turns = std::floor(theta_prev / kPi);
  const double frac = theta_prev - turns * kPi;
  // Direction of diag(a, 1/a) (cos f, sin f) with a^2 = lambda^2 g.
  return turns * kPi + std::atan2(std::sin(frac), lambda * lambda * g_next * std::cos(frac));
}

AngleStep step(const AngleKernel& kernel, double theta_prev, TorusPoint p_next) {
  AngleStep out;
  out.phi = lift_phi(kernel.params.lambda, kernel.g(p_next.w1, p_next.w2), theta_prev);
  out.theta_next = out.phi + kernel.theta(p_next);
  return out;
}

double rp1_distance(double x) {
  const double k = std::round(x / kPi);
  return std::abs(x - k * kPi);
}

// ---------------------------------------------------------------------------
// LeafAngleField

LeafAngleField::LeafAngleField(AngleKernel kernel, const HyperbolicToralMap& map,
                               const Leaf& leaf, int n)
    : kernel_(std::move(kernel)), images_(map, leaf, n), cuts_(images_.accumulated(n)) {
  std::vector<double> bounds;
  bounds.reserve(cuts_.size() + 2);
  bounds.push_back(0.0);
  bounds.insert(bounds.end(), cuts_.begin(), cuts_.end());
  bounds.push_back(leaf.length);
  pieces_.reserve(bounds.size() - 1);
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    LeafPiece piece;
    piece.s_begin = bounds[i];
    piece.s_end = bounds[i + 1];
    piece.offsets = offsets_at(0.5 * (piece.s_begin + piece.s_end));
    pieces_.push_back(std::move(piece));
  }
}

std::size_t LeafAngleField::piece_of(double s) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), s,
                             [](double x, const LeafPiece& p) { return x < p.s_begin; });
  if (it == pieces_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(pieces_.begin(), it)) - 1;
}

std::vector<std::array<double, 2>> LeafAngleField::offsets_at(double s) const {
  std::vector<std::array<double, 2>> out(static_cast<std::size_t>(n()) + 1);
  for (int k = 0; k <= n(); ++k) {
    const Vec2 q = images_.point(k, s);
    out[static_cast<std::size_t>(k)] = {std::floor(q.x), std::floor(q.y)};
  }
  return out;
}

void LeafAngleField::thetas_with(const std::vector<std::array<double, 2>>& offsets, double s,
                                 std::span<double> out) const {
  const double lambda = kernel_.params.lambda;
  double prev = 0.0;
  for (int k = 0; k <= n(); ++k) {
    const auto& off = offsets[static_cast<std::size_t>(k)];
    const Vec2 q = images_.point(k, s);
    const double w1 = q.x - off[0];
    const double w2 = q.y - off[1];
    const double r = kernel_.r(w1, w2);
    const double th = arccot(r);
    const double cur = k == 0 ? th : lift_phi(lambda, r * r + 1.0, prev) + th;
    if (static_cast<std::size_t>(k) < out.size()) out[static_cast<std::size_t>(k)] = cur;
    prev = cur;
    if (static_cast<std::size_t>(k) + 1 >= out.size()) break;
  }
}

void LeafAngleField::thetas(const LeafPiece& piece, double s, std::span<double> out) const {
  thetas_with(piece.offsets, s, out);
}

double LeafAngleField::theta(const LeafPiece& piece, double s, int j) const {
  std::array<double, 64> buf{};
  if (j + 1 > static_cast<int>(buf.size())) {
    std::vector<double> big(static_cast<std::size_t>(j) + 1);
    thetas(piece, s, big);
    return big.back();
  }
  thetas(piece, s, std::span<double>(buf.data(), static_cast<std::size_t>(j) + 1));
  return buf[static_cast<std::size_t>(j)];
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

constexpr double kQuarterTurn = kPi / 4.0;
// Below this width a lift gap is a nested near-vertical ramp that double
// precision cannot split; the pair is kept and counted as steep.
constexpr double kSteepWidth = 1e-14;
constexpr std::size_t kMaxSamples = std::size_t{1} << 26;

struct Refiner {
  const LeafAngleField& field;
  const LeafPiece& piece;
  int j;
  std::vector<double>& s_out;
  std::vector<double>& y_out;
  int& steep;
  std::size_t& budget;

  void run(double a, double ya, double b, double yb) {
    if (!std::isfinite(yb)) {
      throw ResolutionExhausted("non-finite angle lift near s = " + std::to_string(b));
    }
    if (std::abs(yb - ya) < kQuarterTurn) {
      push(b, yb);
      return;
    }
    const double m = 0.5 * (a + b);
    if (b - a <= kSteepWidth * std::max(1.0, std::abs(b)) || !(m > a && m < b)) {
      ++steep;
      push(b, yb);
      return;
    }
    const double ym = field.theta(piece, m, j);
    run(a, ya, m, ym);
    run(m, ym, b, yb);
  }

  void push(double s, double y) {
    if (++budget > kMaxSamples) {
      throw ResolutionExhausted("angle lift sampling exceeded its budget near s = " +
                                std::to_string(s));
    }
    s_out.push_back(s);
    y_out.push_back(y);
  }
};

// Solves lift(s) = target on [s1, s2] given the bracketing values (Illinois).
double solve_level(const LeafAngleField& field, const LeafPiece& piece, int j, double s1,
                   double y1, double s2, double y2, double target) {
  double a = s1;
  double fa = y1 - target;
  double b = s2;
  double fb = y2 - target;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  const double ftol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(target));
  double best = std::abs(fa) < std::abs(fb) ? a : b;
  double best_f = std::min(std::abs(fa), std::abs(fb));
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    double c = (a * fb - b * fa) / (fb - fa);
    if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);
    const double fc = field.theta(piece, c, j) - target;
    if (std::abs(fc) < best_f) {
      best = c;
      best_f = std::abs(fc);
    }
    if (std::abs(fc) <= ftol || std::abs(b - a) < 4.0 * std::numeric_limits<double>::epsilon() *
                                                      std::max(1.0, std::abs(c))) {
      return c;
    }
    if ((fc > 0) == (fb > 0)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  return best;
}

}  // namespace

AngleOrbit orbit_along_leaf(const LeafAngleField& field, int resolution, int j) {
  if (resolution < 2) throw OutOfRange("resolution must be >= 2");
  if (j < 0) j = field.n();
  if (j > field.n()) throw OutOfRange("requested theta_j beyond the field depth");
  const double len = field.leaf().length;
  AngleOrbit orbit;
  orbit.leaf = field.leaf();
  orbit.n = field.n();
  orbit.j = j;
  orbit.branch_jumps = field.discontinuities();
  orbit.pieces.reserve(field.pieces().size());

  const double grid = len / resolution;
  std::size_t budget = 0;
  for (const LeafPiece& piece : field.pieces()) {
    PieceSamples ps;
    ps.s_begin = piece.s_begin;
    ps.s_end = piece.s_end;
    std::vector<double> knots{piece.s_begin};
    if (grid > 0.0) {
      for (double g = (std::floor(piece.s_begin / grid) + 1.0) * grid; g < piece.s_end;
           g += grid) {
        if (g > piece.s_begin) knots.push_back(g);
      }
    }
    knots.push_back(piece.s_end);
    Refiner refiner{field, piece, j, ps.s, ps.lift, orbit.steep_pairs, budget};
    refiner.push(knots.front(), field.theta(piece, knots.front(), j));
    for (std::size_t i = 1; i < knots.size(); ++i) {
      const double s = knots[i];
      refiner.run(ps.s.back(), ps.lift.back(), s, field.theta(piece, s, j));
    }
    orbit.pieces.push_back(std::move(ps));
  }
  return orbit;
}

AngleOrbit orbit_along_leaf(const AngleKernel& kernel, const HyperbolicToralMap& map,
                            const Leaf& leaf, int n, int resolution) {
  const LeafAngleField field(kernel, map, leaf, n);
  return orbit_along_leaf(field, resolution);
}

std::vector<std::pair<double, double>> AngleOrbit::samples() const {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : pieces) {
    for (std::size_t i = 0; i < p.s.size(); ++i) out.emplace_back(p.s[i], p.lift[i]);
  }
  return out;
}

double AngleOrbit::worst_decrease() const {
  double worst = 0.0;
  for (const auto& p : pieces) {
    for (std::size_t i = 1; i < p.lift.size(); ++i) {
      worst = std::max(worst, p.lift[i - 1] - p.lift[i]);
    }
  }
  return worst;
}

bool AngleOrbit::monotone(double tol) const { return worst_decrease() <= tol; }

// ---------------------------------------------------------------------------
// Derivatives

double default_fd_step(const LeafAngleField& field, double s) {
  const LeafPiece& piece = field.pieces()[field.piece_of(s)];
  const double gap = std::min(s - piece.s_begin, piece.s_end - s);
  return std::min(1e-6, gap / 4.0);
}

double directional_derivative_theta(const LeafAngleField& field, double s, double h) {
  if (!(h > 0.0)) throw StraddlesDiscontinuity("finite-difference step must be positive");
  const double len = field.leaf().length;
  if (s - h < 0.0 || s + h >= len) {
    throw StraddlesDiscontinuity("finite-difference stencil leaves the leaf");
  }
  const auto lo = field.offsets_at(s - h);
  const auto hi = field.offsets_at(s + h);
  if (lo != hi || lo != field.offsets_at(s)) {
    throw StraddlesDiscontinuity("finite-difference stencil crosses a discontinuity of theta_n");
  }
  std::vector<double> a(static_cast<std::size_t>(field.n()) + 1);
  std::vector<double> b(a.size());
  field.thetas_with(lo, s - h, a);
  field.thetas_with(lo, s + h, b);
  return (b.back() - a.back()) / (2.0 * h);
}

double directional_derivative_theta(const AngleKernel& kernel, const HyperbolicToralMap& map,
                                    const Leaf& leaf, double s, int n, double h) {
  const LeafAngleField field(kernel, map, leaf, n);
  return directional_derivative_theta(field, s, h) * norm(map.unstable());
}

// ---------------------------------------------------------------------------
// Critical points and bad sets

namespace {

// Number of c in pi/2 + pi Z with lo <= c < hi.
int levels_in(double lo, double hi) {
  return static_cast<int>(std::ceil((hi - kHalfPi) / kPi) - std::ceil((lo - kHalfPi) / kPi));
}

}  // namespace

int critical_census(const AngleOrbit& orbit) {
  int count = 0;
  for (const auto& p : orbit.pieces) {
    for (std::size_t i = 1; i < p.lift.size(); ++i) {
      const double y1 = p.lift[i - 1];
      const double y2 = p.lift[i];
      count += y2 >= y1 ? levels_in(y1, y2) : levels_in(y2, y1);
    }
  }
  return count;
}

int critical_census(const AngleKernel& kernel, const HyperbolicToralMap& map, const Leaf& leaf,
                    int n, int resolution) {
  return critical_census(orbit_along_leaf(kernel, map, leaf, n, resolution));
}

double geometric_bound(double expansion, int m) {
  double s = 0.0;
  for (int j = 0; j <= m; ++j) s += std::pow(expansion, j + 1);
  return s;
}

BadSetEstimate bad_set_measure(const LeafAngleField& field, const AngleOrbit& orbit,
                               double delta) {
  if (!(delta > 0.0 && delta < kHalfPi)) throw OutOfRange("delta must lie in (0, pi/2)");
  BadSetEstimate est;
  est.n = orbit.n;
  est.z = orbit.leaf.z;
  est.delta = delta;
  est.crossing_count = critical_census(orbit);
  const int j = orbit.j;

  double measure = 0.0;
  std::vector<std::pair<double, double>> marks;  // (s, lift) boundary points in a pair
  for (std::size_t pi = 0; pi < orbit.pieces.size(); ++pi) {
    const PieceSamples& ps = orbit.pieces[pi];
    const LeafPiece& piece = field.pieces()[pi];
    for (std::size_t i = 1; i < ps.lift.size(); ++i) {
      const double s1 = ps.s[i - 1];
      const double s2 = ps.s[i];
      const double y1 = ps.lift[i - 1];
      const double y2 = ps.lift[i];
      const double lo = std::min(y1, y2);
      const double hi = std::max(y1, y2);
      marks.clear();
      marks.emplace_back(s1, y1);
      const double m0 = std::floor((lo - kHalfPi - delta) / kPi);
      const double m1 = std::ceil((hi - kHalfPi + delta) / kPi);
      for (double m = m0; m <= m1; m += 1.0) {
        const double c = kHalfPi + m * kPi;
        for (double level : {c - delta, c + delta}) {
          if (level > lo && level < hi) {
            marks.emplace_back(solve_level(field, piece, j, s1, y1, s2, y2, level), level);
          }
        }
      }
      marks.emplace_back(s2, y2);
      std::sort(marks.begin(), marks.end());
      for (std::size_t k = 1; k < marks.size(); ++k) {
        const double mid_lift = 0.5 * (marks[k - 1].second + marks[k].second);
        if (rp1_distance(mid_lift - kHalfPi) < delta) {
          measure += marks[k].first - marks[k - 1].first;
        }
      }
    }
  }
  est.measure = measure;
  return est;
}

BadSetEstimate bad_set_measure(const AngleKernel& kernel, const HyperbolicToralMap& map,
                               const Leaf& leaf, int n, double delta, int resolution) {
  const LeafAngleField field(kernel, map, leaf, n);
  const AngleOrbit orbit = orbit_along_leaf(field, resolution);
  return bad_set_measure(field, orbit, delta);
}

double bad_set_linear_coefficient(const LeafAngleField& field, const AngleOrbit& orbit) {
  double total = 0.0;
  const int j = orbit.j;
  for (std::size_t pi = 0; pi < orbit.pieces.size(); ++pi) {
    const PieceSamples& ps = orbit.pieces[pi];
    const LeafPiece& piece = field.pieces()[pi];
    for (std::size_t i = 1; i < ps.lift.size(); ++i) {
      const double y1 = ps.lift[i - 1];
      const double y2 = ps.lift[i];
      const double lo = std::min(y1, y2);
      const double hi = std::max(y1, y2);
      if (levels_in(lo, hi) == 0) continue;
      const double c = kHalfPi + std::ceil((lo - kHalfPi) / kPi) * kPi;
      const double sc = solve_level(field, piece, j, ps.s[i - 1], y1, ps.s[i], y2, c);
      const double h = std::min({1e-9, (sc - piece.s_begin) / 4.0, (piece.s_end - sc) / 4.0});
      if (!(h > 0.0)) continue;
      const double slope =
          (field.theta(piece, sc + h, j) - field.theta(piece, sc - h, j)) / (2.0 * h);
      total += 2.0 / std::abs(slope);
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// log|cos| quadrature

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss_legendre(const F& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) s += kGlWeights[i] * f(mid + half * kGlNodes[i]);
  return half * s;
}

// Panels per call of integrate_adaptive; inside nested ramps the lift carries
// rounding noise far above any fixed tolerance, so refinement is capped.
constexpr int kPanelBudget = 64;

template <class F>
double adaptive(const F& f, double a, double b, double whole, double tol, int& budget) {
  const double m = 0.5 * (a + b);
  const double left = gauss_legendre(f, a, m);
  const double right = gauss_legendre(f, m, b);
  budget -= 2;
  // Relative floor: rounding in the lift makes tighter targets unreachable.
  const double floor = 1e-12 * (std::abs(left) + std::abs(right));
  if (budget <= 0 || std::abs(left + right - whole) <= std::max(tol, floor) ||
      b - a <= 1e-13 * std::max(1.0, std::abs(a))) {
    return left + right;
  }
  return adaptive(f, a, m, left, 0.5 * tol, budget) + adaptive(f, m, b, right, 0.5 * tol, budget);
}

template <class F>
double integrate_adaptive(const F& f, double a, double b, double tol) {
  int budget = kPanelBudget;
  return adaptive(f, a, b, gauss_legendre(f, a, b), tol, budget);
}

// log|cos x| evaluated as log|sin(x - c)| around the nearest c in pi/2 + pi Z.
double log_abs_cos(double x) {
  const double c = kHalfPi + std::round((x - kHalfPi) / kPi) * kPi;
  return std::log(std::abs(std::sin(x - c)));
}

}  // namespace

double log_cos_integral(const LeafAngleField& field, int j, int resolution, double tol) {
  const AngleOrbit orbit = orbit_along_leaf(field, resolution, j);
  CompensatedSum total;
  for (std::size_t pi = 0; pi < orbit.pieces.size(); ++pi) {
    const PieceSamples& ps = orbit.pieces[pi];
    const LeafPiece& piece = field.pieces()[pi];
    auto plain = [&](double s) { return log_abs_cos(field.theta(piece, s, j)); };
    auto integrate = [&](double a, double b, double singular_at) {
      if (!(b > a)) return 0.0;
      const double len = b - a;
      if (len <= 1e-13 * std::max(1.0, std::abs(a))) {
        // Too narrow for interior nodes; only the analytic log part is kept.
        return std::isnan(singular_at) ? len * plain(0.5 * (a + b)) : len * std::log(len) - len;
      }
      const double itol = tol * len;
      if (std::isnan(singular_at)) {
        return integrate_adaptive(plain, a, b, itol);
      }
      auto smooth = [&](double s) { return plain(s) - std::log(std::abs(s - singular_at)); };
      return integrate_adaptive(smooth, a, b, itol) +
             (len * std::log(len) - len);
    };
    for (std::size_t i = 1; i < ps.lift.size(); ++i) {
      const double s1 = ps.s[i - 1];
      const double s2 = ps.s[i];
      const double y1 = ps.lift[i - 1];
      const double y2 = ps.lift[i];
      const double lo = std::min(y1, y2);
      const double hi = std::max(y1, y2);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      if (levels_in(lo, hi) == 0) {
        total.add(integrate(s1, s2, nan));
        continue;
      }
      const double c = kHalfPi + std::ceil((lo - kHalfPi) / kPi) * kPi;
      const double sc = solve_level(field, piece, j, s1, y1, s2, y2, c);
      total.add(integrate(s1, sc, sc));
      total.add(integrate(sc, s2, sc));
    }
  }
  return total.value();
}

}  // namespace catlyap
