#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>

#include "cat0bd/rational.hpp"
#include "cat0bd/tree_end.hpp"
#include "cat0bd/tree_space.hpp"

namespace cat0bd {

/// Point of X = T x R with the l2 product metric.
template <class S>
struct BasicSpacePoint {
  BasicTreePoint<S> tree;
  S height{};

  friend bool operator==(const BasicSpacePoint&, const BasicSpacePoint&) = default;
};

using SpacePoint = BasicSpacePoint<Rational>;
using SpacePointF = BasicSpacePoint<double>;

inline SpacePoint space_point(const Word& vertex, Rational height) {
  return {TreePoint::vertex(vertex), height};
}

inline SpacePointF to_float(const SpacePoint& p) { return {to_float(p.tree), p.height.to_double()}; }

/// "(<treepoint>, h=<rational>)"
inline std::string to_string(const SpacePoint& p) {
  return "(" + to_string(p.tree) + ", h=" + p.height.to_string() + ")";
}
inline std::string to_string(const SpacePointF& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << to_string(p.tree) << ", h=" << p.height << ")";
  return os.str();
}

inline SpacePoint parse_space_point(std::string_view text) {
  auto strip = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  text = strip(text);
  if (text.size() < 2 || text.front() != '(' || text.back() != ')')
    throw std::invalid_argument("space point must look like '(<tree>, h=<q>)': '" + std::string(text) + "'");
  auto body = text.substr(1, text.size() - 2);
  auto comma = body.find(',');
  if (comma == std::string_view::npos) throw std::invalid_argument("space point is missing ', h='");
  auto h = strip(body.substr(comma + 1));
  if (h.substr(0, 2) == "h=") h.remove_prefix(2);
  return {parse_tree_point(strip(body.substr(0, comma))), Rational::parse(h)};
}

template <class S>
S dist_sq(const BasicSpacePoint<S>& p, const BasicSpacePoint<S>& q) {
  const S dt = tree_dist(p.tree, q.tree);
  const S dh = p.height - q.height;
  return dt * dt + dh * dh;
}

template <class S>
double dist(const BasicSpacePoint<S>& p, const BasicSpacePoint<S>& q) {
  return std::sqrt(to_double(dist_sq(p, q)));
}

/// Point of the boundary of T x R in join coordinates.
///
/// Directional points carry the tree end and the slope (height gained per
/// unit of tree distance, the tangent of the join angle). Poles are the two
/// purely vertical directions.
class BoundaryPoint {
 public:
  struct Directional {
    TreeEnd end;
    Rational slope;
    friend bool operator==(const Directional&, const Directional&) = default;
  };
  struct Pole {
    int sign;
    friend bool operator==(const Pole&, const Pole&) = default;
  };

  static BoundaryPoint directional(TreeEnd end, Rational slope) {
    return BoundaryPoint(Directional{std::move(end), slope});
  }
  static BoundaryPoint pole(int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("pole sign must be +1 or -1");
    return BoundaryPoint(Pole{sign});
  }

  bool is_pole() const { return std::holds_alternative<Pole>(v_); }
  const Directional& dir() const { return std::get<Directional>(v_); }
  int pole_sign() const { return std::get<Pole>(v_).sign; }

  /// Join angle in radians.
  double angle() const {
    if (is_pole()) return pole_sign() * std::acos(0.0);
    return std::atan(dir().slope.to_double());
  }

  /// "[<end>, slope=<q>]" or "[pole, +]" / "[pole, -]".
  std::string to_string() const {
    if (is_pole()) return std::string("[pole, ") + (pole_sign() > 0 ? "+" : "-") + "]";
    return "[" + dir().end.to_string() + ", slope=" + dir().slope.to_string() + "]";
  }

  /// Also accepts the compact "[a^inf,0/1]" and "[pole,+]".
  static BoundaryPoint parse(std::string_view text) {
    auto strip = [](std::string_view s) {
      while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
      while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
      return s;
    };
    text = strip(text);
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
      throw std::invalid_argument("boundary point must be bracketed: '" + std::string(text) + "'");
    auto body = text.substr(1, text.size() - 2);
    auto comma = body.rfind(',');
    if (comma == std::string_view::npos) throw std::invalid_argument("boundary point needs two fields");
    auto first = strip(body.substr(0, comma));
    auto second = strip(body.substr(comma + 1));
    if (first == "pole") {
      if (second == "+") return pole(1);
      if (second == "-") return pole(-1);
      throw std::invalid_argument("pole sign must be + or -");
    }
    if (second.substr(0, 6) == "slope=") second.remove_prefix(6);
    return directional(TreeEnd::parse(first), Rational::parse(second));
  }

  friend bool operator==(const BoundaryPoint&, const BoundaryPoint&) = default;

 private:
  explicit BoundaryPoint(std::variant<Directional, Pole> v) : v_(std::move(v)) {}
  std::variant<Directional, Pole> v_;
};

struct GeodesicSegment {
  SpacePoint p;
  SpacePoint q;
};

struct GeodesicRay {
  SpacePoint base;
  BoundaryPoint target;
};

/// Point at parameter t in [0, 1]; both factors are affine in t.
inline SpacePoint segment_eval(const GeodesicSegment& seg, const Rational& t) {
  if (t < Rational(0) || Rational(1) < t) throw OutOfRange("segment_eval: t outside [0, 1]");
  const Rational d = tree_dist(seg.p.tree, seg.q.tree);
  return {tree_geodesic_eval(seg.p.tree, seg.q.tree, t * d), seg.p.height + t * (seg.q.height - seg.p.height)};
}

/// Floating point at arclength r from p towards q (r clamped to the segment).
template <class S>
SpacePointF point_at_arclength(const BasicSpacePoint<S>& p, const BasicSpacePoint<S>& q, double r) {
  SpacePointF pf{BasicTreePoint<double>(p.tree.anchor, to_double(p.tree.offset)), to_double(p.height)};
  SpacePointF qf{BasicTreePoint<double>(q.tree.anchor, to_double(q.tree.offset)), to_double(q.height)};
  const double len = dist(pf, qf);
  if (len == 0.0) return pf;
  const double t = std::clamp(r / len, 0.0, 1.0);
  const double dt = tree_dist(pf.tree, qf.tree);
  return {tree_geodesic_eval(pf.tree, qf.tree, t * dt), pf.height + t * (qf.height - pf.height)};
}

/// Exact ray point after advancing tau in the tree (and tau*slope in height).
/// For a pole, tau is the vertical distance.
inline SpacePoint ray_eval_tree_param(const GeodesicRay& ray, const Rational& tau) {
  if (tau < Rational(0)) throw OutOfRange("ray_eval_tree_param: negative parameter");
  if (ray.target.is_pole()) return {ray.base.tree, ray.base.height + Rational(ray.target.pole_sign()) * tau};
  const auto& d = ray.target.dir();
  return {tree_ray_eval(ray.base.tree, d.end, tau), ray.base.height + d.slope * tau};
}

/// Unit-speed ray point at arclength s (floating point).
inline SpacePointF ray_eval(const GeodesicRay& ray, double s) {
  if (s < 0) throw OutOfRange("ray_eval: negative arclength");
  const auto base = to_float(ray.base);
  if (ray.target.is_pole()) return {base.tree, base.height + ray.target.pole_sign() * s};
  const auto& d = ray.target.dir();
  const double v = d.slope.to_double();
  const double tau = s / std::sqrt(1.0 + v * v);
  return {tree_ray_eval(base.tree, d.end, tau), base.height + v * tau};
}

/// Minimum of f(tau) = (delta + |tau - sigma|)^2 + (e0 - kappa*tau)^2 over
/// tau in [0, hi] (hi absent means unbounded). f is convex; each side of the
/// breakpoint sigma is a quadratic with leading coefficient 1 + kappa^2.
template <class S>
struct PiecewiseMin {
  S value;
  S param;
};

template <class S>
PiecewiseMin<S> minimize_tent_quadratic(const S& delta, const S& sigma, const S& e0, const S& kappa,
                                        const std::optional<S>& hi) {
  auto f = [&](const S& tau) {
    const S tree = delta + scalar_abs(tau - sigma);
    const S h = e0 - kappa * tau;
    return tree * tree + h * h;
  };
  auto clamp = [&](S tau, const S& lo, const std::optional<S>& up) {
    if (tau < lo) tau = lo;
    if (up && *up < tau) tau = *up;
    return tau;
  };
  const S lead = S(1) + kappa * kappa;
  const std::optional<S> left_hi = hi ? std::optional<S>(scalar_min(sigma, *hi)) : std::optional<S>(sigma);
  const S left = clamp((delta + sigma + e0 * kappa) / lead, S(0), left_hi);
  const S right = clamp((e0 * kappa - (delta - sigma)) / lead, scalar_min(sigma, hi ? *hi : sigma), hi);
  const S fl = f(left);
  const S fr = f(right);
  if (fr < fl) return {fr, right};
  return {fl, left};
}

/// Exact min over t in [0, 1] of d^2(x, seg(t)) and the minimizing t.
template <class S>
struct SegmentDistance {
  S d_sq;
  S t;
};

template <class S>
SegmentDistance<S> dist_point_to_segment(const BasicSpacePoint<S>& x, const BasicSpacePoint<S>& p,
                                         const BasicSpacePoint<S>& q) {
  const auto proj = dist_point_to_tree_geodesic(x.tree, p.tree, q.tree);
  const S len = tree_dist(p.tree, q.tree);
  const S e0 = x.height - p.height;
  const S rise = q.height - p.height;
  if (len == S(0)) {
    S t(0);
    if (rise != S(0)) t = scalar_min(S(1), scalar_max(S(0), e0 / rise));
    const S h = e0 - rise * t;
    return {proj.distance * proj.distance + h * h, t};
  }
  auto m = minimize_tent_quadratic(proj.distance, proj.param, e0, rise / len, std::optional<S>(len));
  return {m.value, m.param / len};
}

inline SegmentDistance<Rational> dist_point_to_segment(const SpacePoint& x, const GeodesicSegment& seg) {
  return dist_point_to_segment(x, seg.p, seg.q);
}

/// Squared distance from x to the image of the ray, with the minimizing tree
/// parameter (vertical distance for poles).
template <class S>
PiecewiseMin<S> dist_point_to_ray(const BasicSpacePoint<S>& x, const BasicSpacePoint<S>& base,
                                  const BoundaryPoint& target) {
  const S e0 = x.height - base.height;
  if (target.is_pole()) {
    const S sign(target.pole_sign());
    const S tau = scalar_max(S(0), sign * e0);
    const S dt = tree_dist(x.tree, base.tree);
    const S h = e0 - sign * tau;
    return {dt * dt + h * h, tau};
  }
  const auto& d = target.dir();
  const auto proj = dist_point_to_tree_ray(x.tree, base.tree, d.end);
  S slope;
  if constexpr (std::is_same_v<S, double>) {
    slope = d.slope.to_double();
  } else {
    slope = d.slope;
  }
  return minimize_tent_quadratic(proj.distance, proj.param, e0, slope, std::optional<S>());
}

inline bool segment_meets_ball(const GeodesicSegment& seg, const SpacePoint& center, const Rational& radius) {
  if (radius < Rational(0)) throw std::invalid_argument("segment_meets_ball: negative radius");
  return !(radius * radius < dist_point_to_segment(center, seg).d_sq);
}

/// In T x R two rays are asymptotic exactly when their targets coincide.
inline bool asymptotic(const GeodesicRay& r1, const GeodesicRay& r2) { return r1.target == r2.target; }

}  // namespace cat0bd
