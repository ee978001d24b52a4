#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>

#include "cat0bd/errors.hpp"
#include "cat0bd/rational.hpp"
#include "cat0bd/tree_end.hpp"
#include "cat0bd/word.hpp"

namespace cat0bd {

// Scalar plumbing shared by the exact (Rational) and floating (double) paths.

inline std::int64_t scalar_floor(const Rational& x) { return x.floor(); }
inline std::int64_t scalar_floor(double x) { return static_cast<std::int64_t>(std::floor(x)); }
inline double to_double(const Rational& x) { return x.to_double(); }
inline double to_double(double x) { return x; }

template <class S>
S scalar_from(std::int64_t v) {
  return S(v);
}

template <class S>
S scalar_min(const S& x, const S& y) {
  return y < x ? y : x;
}
template <class S>
S scalar_max(const S& x, const S& y) {
  return x < y ? y : x;
}
template <class S>
S scalar_abs(const S& x) {
  return x < S(0) ? -x : x;
}

/// Point of the Cayley tree T of F2 (unit edges).
///
/// With offset == 0 this is the vertex `anchor`. Otherwise it lies on the
/// edge from anchor's parent to anchor, at distance `offset` from the parent,
/// i.e. at depth |anchor| - 1 + offset below the identity vertex.
template <class S>
struct BasicTreePoint {
  Word anchor;
  S offset{};

  BasicTreePoint() = default;
  BasicTreePoint(Word w, S off) : anchor(std::move(w)), offset(off) {
    if (offset < S(0) || !(offset < S(1)))
      throw std::invalid_argument("tree point offset must lie in [0, 1)");
    if (anchor.empty() && offset != S(0))
      throw std::invalid_argument("tree point off the identity needs a nonempty anchor");
  }
  static BasicTreePoint vertex(Word w) { return BasicTreePoint(std::move(w), S(0)); }

  bool is_vertex() const { return offset == S(0); }

  /// Distance from the identity vertex.
  S depth() const {
    auto n = scalar_from<S>(static_cast<std::int64_t>(anchor.size()));
    return is_vertex() ? n : n - S(1) + offset;
  }

  friend bool operator==(const BasicTreePoint&, const BasicTreePoint&) = default;
};

using TreePoint = BasicTreePoint<Rational>;
using TreePointF = BasicTreePoint<double>;

inline TreePointF to_float(const TreePoint& p) { return TreePointF(p.anchor, p.offset.to_double()); }

/// "word+num/den" (vertex: offset 0/1).
inline std::string to_string(const TreePoint& p) { return p.anchor.str() + "+" + p.offset.to_string(); }

inline std::string to_string(const TreePointF& p) {
  std::ostringstream os;
  os.precision(17);
  os << p.anchor.str() << "+" << p.offset;
  return os.str();
}

inline TreePoint parse_tree_point(std::string_view text) {
  auto plus = text.find('+');
  auto word = text.substr(0, plus);
  if (word == "e") word = {};
  if (plus == std::string_view::npos) return TreePoint::vertex(Word(word));
  return TreePoint(Word(word), Rational::parse(text.substr(plus + 1)));
}

/// The point at depth d on the root path of `path` (0 <= d <= |path|).
template <class S>
BasicTreePoint<S> point_on_root_path(const Word& path, S d) {
  const auto len = scalar_from<S>(static_cast<std::int64_t>(path.size()));
  if (d < S(0)) d = S(0);
  if (len < d) d = len;
  std::int64_t k = scalar_floor(d);
  S frac = d - scalar_from<S>(k);
  if (frac == S(0)) return BasicTreePoint<S>::vertex(path.prefix(static_cast<std::size_t>(k)));
  return BasicTreePoint<S>(path.prefix(static_cast<std::size_t>(k + 1)), frac);
}

/// Depth of the branch point of the root paths of p and q.
template <class S>
S meet_depth(const BasicTreePoint<S>& p, const BasicTreePoint<S>& q) {
  auto lcp = scalar_from<S>(static_cast<std::int64_t>(common_prefix(p.anchor, q.anchor)));
  return scalar_min(lcp, scalar_min(p.depth(), q.depth()));
}

template <class S>
S tree_dist(const BasicTreePoint<S>& p, const BasicTreePoint<S>& q) {
  return p.depth() + q.depth() - S(2) * meet_depth(p, q);
}

/// Point at distance s from p on the unique geodesic [p, q].
template <class S>
BasicTreePoint<S> tree_geodesic_eval(const BasicTreePoint<S>& p, const BasicTreePoint<S>& q, S s) {
  const S d = tree_dist(p, q);
  if (s < S(0) || d < s) {
    if constexpr (std::is_same_v<S, double>) {
      if (s < -1e-9 || s > d + 1e-9) throw OutOfRange("tree_geodesic_eval: parameter outside [0, d]");
      s = std::clamp(s, 0.0, d);
    } else {
      throw OutOfRange("tree_geodesic_eval: parameter outside [0, d]");
    }
  }
  const S m = meet_depth(p, q);
  const S up = p.depth() - m;
  if (!(up < s)) return point_on_root_path(p.anchor, p.depth() - s);
  return point_on_root_path(q.anchor, m + (s - up));
}

/// Letters of `end` shared with the root path of p, capped at p's depth.
template <class S>
S meet_depth_with_end(const BasicTreePoint<S>& p, const TreeEnd& end) {
  std::size_t lcp = 0;
  while (lcp < p.anchor.size() && p.anchor[lcp] == end.letter_at(lcp)) ++lcp;
  return scalar_min(scalar_from<S>(static_cast<std::int64_t>(lcp)), p.depth());
}

/// Point at distance s along the ray from `base` to `end`.
template <class S>
BasicTreePoint<S> tree_ray_eval(const BasicTreePoint<S>& base, const TreeEnd& end, S s) {
  if (s < S(0)) throw OutOfRange("tree_ray_eval: negative parameter");
  const S m = meet_depth_with_end(base, end);
  const S up = base.depth() - m;
  if (!(up < s)) return point_on_root_path(base.anchor, base.depth() - s);
  const S target = m + (s - up);
  auto letters = static_cast<std::size_t>(scalar_floor(target)) + 1;
  return point_on_root_path(end.expand(letters), target);
}

/// Distance from x to the geodesic [p, q] and the arclength (from p) of the
/// projection. Along the geodesic, dist(x, gamma(s)) = distance + |s - param|.
template <class S>
struct TreeProjection {
  S distance;
  S param;
};

template <class S>
TreeProjection<S> dist_point_to_tree_geodesic(const BasicTreePoint<S>& x, const BasicTreePoint<S>& p,
                                              const BasicTreePoint<S>& q) {
  const S dp = tree_dist(p, x);
  const S dq = tree_dist(q, x);
  const S d = tree_dist(p, q);
  // Gromov products in a tree are exact.
  return {(dp + dq - d) / S(2), (dp + d - dq) / S(2)};
}

/// Projection of x onto the ray from base towards end.
template <class S>
TreeProjection<S> dist_point_to_tree_ray(const BasicTreePoint<S>& x, const BasicTreePoint<S>& base,
                                         const TreeEnd& end) {
  // The projection lies within d(base, x) of base, so a finite piece of the
  // ray long enough to pass that point gives the same answer.
  const S reach = tree_dist(base, x) + S(1);
  return dist_point_to_tree_geodesic(x, base, tree_ray_eval(base, end, reach));
}

}  // namespace cat0bd
