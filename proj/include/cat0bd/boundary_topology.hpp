#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "cat0bd/errors.hpp"
#include "cat0bd/group_action.hpp"
#include "cat0bd/product_space.hpp"
#include "cat0bd/rational.hpp"
#include "cat0bd/word_group.hpp"

namespace cat0bd {

/// Absolute slack on metric comparisons that involve arclength parameters.
inline constexpr double kMetricTol = 1e-9;

struct NeighborhoodParams {
  double r;
  double epsilon;

  NeighborhoodParams(double radius, double eps) : r(radius), epsilon(eps) {
    if (!(r > 0) || !(epsilon > 0)) throw std::invalid_argument("neighborhood needs r > 0 and epsilon > 0");
  }
};

/// A point of X or of its boundary.
using Endpoint = std::variant<SpacePoint, BoundaryPoint>;

inline SpacePointF to_float_point(const SpacePoint& p) { return to_float(p); }

/// xi_x(r): the point at arclength r on the geodesic from base to x. Segments
/// stop at x.
inline SpacePointF geodesic_point(const SpacePoint& base, const Endpoint& x, double r) {
  if (const auto* p = std::get_if<SpacePoint>(&x)) return point_at_arclength(base, *p, r);
  return ray_eval(GeodesicRay{base, std::get<BoundaryPoint>(x)}, r);
}

/// Squared distance from p to the image of the geodesic from base to x.
inline double image_dist_sq(const SpacePointF& p, const SpacePoint& base, const Endpoint& x) {
  const SpacePointF b = to_float(base);
  if (const auto* q = std::get_if<SpacePoint>(&x)) return dist_point_to_segment(p, b, to_float(*q)).d_sq;
  return dist_point_to_ray(p, b, std::get<BoundaryPoint>(x)).value;
}

namespace detail {

inline bool outside_ball(const SpacePoint& base, const Endpoint& x, double r) {
  const auto* p = std::get_if<SpacePoint>(&x);
  if (!p) return true;
  return dist_sq(base, *p).to_double() > r * r;
}

}  // namespace detail

/// x in U(alpha; r, eps): x outside B(base, r) and d(xi_alpha(r), xi_x(r)) < eps.
inline bool in_U(const BoundaryPoint& alpha, const NeighborhoodParams& params, const Endpoint& x,
                 const SpacePoint& base) {
  if (!detail::outside_ball(base, x, params.r)) return false;
  const auto a = ray_eval(GeodesicRay{base, alpha}, params.r);
  return dist(a, geodesic_point(base, x, params.r)) < params.epsilon + kMetricTol;
}

/// x in U'(alpha; r, eps): as in_U, measured to the whole image of xi_x.
inline bool in_U_prime(const BoundaryPoint& alpha, const NeighborhoodParams& params, const Endpoint& x,
                       const SpacePoint& base) {
  if (!detail::outside_ball(base, x, params.r)) return false;
  const auto a = ray_eval(GeodesicRay{base, alpha}, params.r);
  return std::sqrt(image_dist_sq(a, base, x)) < params.epsilon + kMetricTol;
}

struct CauchyWitness {
  double r;
  std::size_t i;  ///< candidate start index (0-based in the sample)
  std::size_t j;  ///< first later sample that leaves U(x_i; r, eps0)
};

struct CauchyVerdict {
  bool consistent = true;
  std::optional<CauchyWitness> witness;
  /// Radii the sample is too short to test: no candidate start in the first
  /// half of the sample lies outside B(base, r).
  std::vector<double> unresolved_r;
};

inline const std::vector<double>& default_r_values() {
  static const std::vector<double> v{1, 2, 4, 8, 16};
  return v;
}

/// Sampled version of the Cauchy-sequence definition. For each r, looks for a
/// start i0 in the first half of the sample with every later x_j in
/// U(x_i0; r, eps0). A finite sample can refute but never prove.
inline CauchyVerdict is_cauchy_sample(const std::vector<SpacePoint>& points, double eps0,
                                      const std::vector<double>& r_values, const SpacePoint& base) {
  if (points.empty()) throw std::invalid_argument("is_cauchy_sample: empty sample");
  if (!(eps0 > 0)) throw std::invalid_argument("is_cauchy_sample: eps0 must be positive");
  CauchyVerdict verdict;
  const std::size_t n = points.size();
  if (n < 2) return verdict;
  const std::size_t candidates = (n + 1) / 2;
  std::vector<double> d_base(n);
  for (std::size_t i = 0; i < n; ++i) d_base[i] = dist(base, points[i]);

  for (double r : r_values) {
    if (!(r > 0)) throw std::invalid_argument("is_cauchy_sample: radii must be positive");
    std::vector<SpacePointF> at_r(n);
    for (std::size_t i = 0; i < n; ++i) at_r[i] = point_at_arclength(base, points[i], r);
    bool tested = false, found = false;
    std::optional<CauchyWitness> last_failure;
    for (std::size_t i0 = 0; i0 < candidates && !found; ++i0) {
      if (!(d_base[i0] > r)) continue;
      tested = true;
      std::optional<std::size_t> bad;
      for (std::size_t j = i0 + 1; j < n && !bad; ++j) {
        if (!(d_base[j] > r) || !(dist(at_r[i0], at_r[j]) < eps0 + kMetricTol)) bad = j;
      }
      if (!bad) found = true;
      else last_failure = CauchyWitness{r, i0, *bad};
    }
    if (!tested) {
      verdict.unresolved_r.push_back(r);
      continue;
    }
    if (!found && verdict.consistent) {
      verdict.consistent = false;
      verdict.witness = last_failure;
    }
  }
  return verdict;
}

namespace detail {

/// Shortest (prefix, period) whose infinite word starts with w, using at
/// least two full periods of w.
inline std::optional<TreeEnd> fit_periodic(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t total = 1; total <= n; ++total) {
    for (std::size_t c = 1; c <= total; ++c) {
      const std::size_t p = total - c;
      if (p + 2 * c > n) continue;
      bool ok = true;
      for (std::size_t i = p + c; i < n && ok; ++i) ok = w[i] == w[i - c];
      if (ok) return TreeEnd(w.prefix(p), w.prefix(p + c).suffix_from(p));
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Boundary limit of the orbit points g_i . base, read off the tail of the
/// sample: the end from the stable common prefix of the tree parts, the slope
/// as the simplest rational inside the error window of the tail's chord.
struct LimitEstimate {
  BoundaryPoint point;
  double slope_halfwidth = 0;  ///< 0 for poles

  /// The slope is the only rational with its denominator or less in the window.
  bool resolved() const {
    if (point.is_pole()) return true;
    const double q = static_cast<double>(point.dir().slope.den());
    return slope_halfwidth < 1.0 / (4.0 * q * q);
  }
};

inline LimitEstimate estimate_orbit_limit(const std::vector<GroupElement>& seq, const ActionSpec& spec,
                                          const SpacePoint& base) {
  if (seq.size() < 2) throw NotConvergent("limit_of_orbit_sequence: need at least two samples", 0.0);
  if (!base.tree.is_vertex()) throw std::invalid_argument("limit_of_orbit_sequence: base must be a vertex");
  const std::size_t n = seq.size();
  const std::size_t tail_start = n / 2;

  struct Sample {
    double tree;
    double height;
    Word vertex;
  };
  std::vector<Sample> tail;
  for (std::size_t i = tail_start; i < n; ++i) {
    SpacePoint p = act(spec, seq[i], base);
    tail.push_back({tree_dist(base.tree, p.tree).to_double(), (p.height - base.height).to_double(), p.tree.anchor});
  }
  const Sample& last = tail.back();
  const double norm = std::hypot(last.tree, last.height);
  if (norm == 0.0) throw NotConvergent("limit_of_orbit_sequence: sample ends at the base point", 0.0);

  // Vertical test for tails that climb faster than they spread: chord of tree
  // distance against height, with the same error window as the slope below. A
  // pole is the case where zero is the simplest inverse slope in the window.
  const Sample& first = tail.front();
  const double rise = last.height - first.height;
  if (std::abs(rise) > std::abs(last.tree - first.tree)) {
    const double inv_hat = (last.tree - first.tree) / rise;
    double dev_t = 0;
    for (const auto& s : tail)
      dev_t = std::max(dev_t, std::abs(s.tree - first.tree - inv_hat * (s.height - first.height)));
    const double err_t = 2 * (dev_t + 1) / std::abs(rise) + kMetricTol;
    if (std::abs(inv_hat) < err_t && simplest_between(inv_hat - err_t, inv_hat + err_t) == Rational(0)) {
      if (first.height * last.height > 0 && std::abs(last.height) > std::abs(first.height))
        return {BoundaryPoint::pole(last.height > 0 ? 1 : -1), 0};
      throw NotConvergent("limit_of_orbit_sequence: vertical direction does not settle", std::abs(last.height));
    }
  }

  // End: common prefix of the tail's tree points as seen from the identity.
  Word common = tail.front().vertex;
  for (const auto& s : tail) common = common.prefix(cat0bd::common_prefix(common, s.vertex));
  // Each tail point must actually travel along the common prefix.
  const double min_depth = std::min_element(tail.begin(), tail.end(), [](const Sample& a, const Sample& b) {
                             return a.vertex.size() < b.vertex.size();
                           })->vertex.size();
  auto end = detail::fit_periodic(common);
  if (!end || static_cast<double>(common.size()) < min_depth / 2)
    throw NotConvergent("limit_of_orbit_sequence: tree direction does not settle",
                        static_cast<double>(common.size()) + 1);

  // Slope: chord through the first and last tail points, so a bounded
  // height offset does not bias it; the tail's spread about the chord sets
  // the uncertainty.
  const double run = last.tree - first.tree;
  if (!(run > 0)) throw NotConvergent("limit_of_orbit_sequence: tail does not advance in the tree", last.tree + 1);
  const double slope_hat = (last.height - first.height) / run;
  double dev = 0;
  for (const auto& s : tail)
    dev = std::max(dev, std::abs(s.height - first.height - slope_hat * (s.tree - first.tree)));
  const double err = 2 * (dev + 1) / run + kMetricTol;
  return {BoundaryPoint::directional(*end, simplest_between(slope_hat - err, slope_hat + err)), err};
}

inline BoundaryPoint limit_of_orbit_sequence(const std::vector<GroupElement>& seq, const ActionSpec& spec,
                                             const SpacePoint& base) {
  return estimate_orbit_limit(seq, spec, base).point;
}

}  // namespace cat0bd
