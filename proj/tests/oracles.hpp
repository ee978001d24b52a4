#pragma once

// Brute-force reference implementations and random generators shared by the
// tests. Nothing here calls the routine it is used to check.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cat0bd/cat0bd.hpp"

namespace oracle {

using namespace cat0bd;

inline char inv(char c) {
  switch (c) {
    case 'a': return 'A';
    case 'A': return 'a';
    case 'b': return 'B';
    default: return 'b';
  }
}

/// Free reduction with an explicit stack.
inline std::string reduce(const std::string& s) {
  std::string st;
  for (char c : s) {
    if (!st.empty() && st.back() == inv(c)) st.pop_back();
    else st.push_back(c);
  }
  return st;
}

inline std::string invert(const std::string& s) {
  std::string r(s.rbegin(), s.rend());
  for (char& c : r) c = inv(c);
  return r;
}

/// Every string over {a,A,b,B} up to length L, reduced and deduplicated.
inline std::set<std::string> reduced_words(int L) {
  std::set<std::string> out{""};
  std::vector<std::string> layer{""};
  for (int n = 0; n < L; ++n) {
    std::vector<std::string> next;
    for (const auto& w : layer)
      for (char c : std::string("aAbB")) next.push_back(w + c);
    for (const auto& w : next) out.insert(reduce(w));
    layer = next;
  }
  return out;
}

/// Vertex distance: length of the reduced u^-1 v.
inline std::int64_t vertex_dist(const std::string& u, const std::string& v) {
  return static_cast<std::int64_t>(reduce(invert(u) + v).size());
}

/// Tree distance through edge endpoints. A point with anchor w and offset o
/// sits on the edge from parent(w) (distance o) to w (distance 1 - o).
inline Rational tree_dist(const TreePoint& p, const TreePoint& q) {
  struct End {
    std::string v;
    Rational d;
  };
  auto ends = [](const TreePoint& x) {
    const std::string w = x.anchor.str();
    if (x.offset == Rational(0)) return std::vector<End>{{w, Rational(0)}};
    return std::vector<End>{{w.substr(0, w.size() - 1), x.offset}, {w, Rational(1) - x.offset}};
  };
  if (p.offset != Rational(0) && q.offset != Rational(0) && p.anchor == q.anchor) return abs(p.offset - q.offset);
  std::optional<Rational> best;
  for (const auto& e1 : ends(p))
    for (const auto& e2 : ends(q)) {
      Rational d = e1.d + Rational(vertex_dist(e1.v, e2.v)) + e2.d;
      if (!best || d < *best) best = d;
    }
  return *best;
}

inline Rational dist_sq(const SpacePoint& p, const SpacePoint& q) {
  const Rational dt = tree_dist(p.tree, q.tree);
  const Rational dh = p.height - q.height;
  return dt * dt + dh * dh;
}

/// Point at tree arclength s from p towards q, by walking edges one at a time.
inline TreePoint walk(const TreePoint& p, const TreePoint& q, const Rational& s) {
  // Candidate points: every vertex on the path plus p and q; pick the one
  // consistent with d(p, x) = s and d(x, q) = d(p, q) - s by scanning edges.
  const Rational total = tree_dist(p, q);
  std::vector<std::string> verts;
  const std::string pa = p.anchor.str(), qa = q.anchor.str();
  for (std::size_t i = 0; i <= pa.size(); ++i) verts.push_back(pa.substr(0, i));
  for (std::size_t i = 0; i <= qa.size(); ++i) verts.push_back(qa.substr(0, i));
  for (const auto& v : verts) {
    const TreePoint tv = TreePoint::vertex(Word(v));
    if (tree_dist(p, tv) == s && tree_dist(tv, q) == total - s) return tv;
  }
  // Interior of an edge (child c, parent c minus last letter).
  for (const auto& c : verts) {
    if (c.empty()) continue;
    const Rational dc = tree_dist(p, TreePoint::vertex(Word(c)));
    const Rational dpar = tree_dist(p, TreePoint::vertex(Word(c.substr(0, c.size() - 1))));
    // Last two: x on p's own edge.
    for (const Rational& off : {Rational(1) - (s - dc), s - dpar, p.offset + s, p.offset - s}) {
      if (!(Rational(0) < off && off < Rational(1))) continue;
      TreePoint x(Word(c), off);
      if (tree_dist(p, x) == s && tree_dist(x, q) == total - s) return x;
    }
  }
  throw std::logic_error("oracle::walk found no point");
}

/// Exact minimum of d^2(x, seg(t)) over the grid t = j / n.
inline Rational grid_min_segment(const SpacePoint& x, const SpacePoint& p, const SpacePoint& q, std::int64_t n) {
  const Rational len = tree_dist(p.tree, q.tree);
  std::optional<Rational> best;
  for (std::int64_t j = 0; j <= n; ++j) {
    const Rational t(j, n);
    SpacePoint pt{walk(p.tree, q.tree, t * len), p.height + t * (q.height - p.height)};
    Rational d = dist_sq(x, pt);
    if (!best || d < *best) best = d;
  }
  return *best;
}

/// Exact minimum of d^2(x, [p, q]) for vertices x, p, q: on each unit piece
/// of the tree path the tree distance to x is affine, so d^2 is a quadratic
/// minimized in closed form on that piece.
inline Rational piecewise_segment_min(const SpacePoint& x, const SpacePoint& p, const SpacePoint& q) {
  const std::string pa = p.tree.anchor.str(), qa = q.tree.anchor.str();
  const std::int64_t len = vertex_dist(pa, qa);
  const Rational e0 = x.height - p.height;
  const Rational rise = q.height - p.height;
  const Rational d0(vertex_dist(x.tree.anchor.str(), pa));
  if (len == 0) {
    Rational t;
    if (rise != Rational(0)) t = min(Rational(1), max(Rational(0), e0 / rise));
    const Rational h = e0 - rise * t;
    return d0 * d0 + h * h;
  }
  // Vertices along the path, by arclength.
  std::vector<TreePoint> path;
  for (std::int64_t i = 0; i <= len; ++i) path.push_back(walk(p.tree, q.tree, Rational(i)));
  const Rational kappa = rise / Rational(len);
  std::optional<Rational> best;
  for (std::int64_t i = 0; i < len; ++i) {
    const Rational di = tree_dist(x.tree, path[static_cast<std::size_t>(i)]);
    const Rational dn = tree_dist(x.tree, path[static_cast<std::size_t>(i + 1)]);
    const Rational s = dn - di;  // +1 or -1
    Rational tau = (Rational(i) - s * di + kappa * e0) / (Rational(1) + kappa * kappa);
    tau = min(Rational(i + 1), max(Rational(i), tau));
    const Rational dt = di + s * (tau - Rational(i));
    const Rational h = e0 - kappa * tau;
    const Rational f = dt * dt + h * h;
    if (!best || f < *best) best = f;
  }
  return *best;
}

// Random generators -----------------------------------------------------------

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Word word(std::size_t max_len) {
    std::string s;
    const auto len = static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(max_len)));
    while (s.size() < len) {
      char c = "aAbB"[uniform(0, 3)];
      if (!s.empty() && s.back() == inv(c)) continue;
      s.push_back(c);
    }
    return Word(s);
  }

  GroupElement element(std::size_t max_len, std::int64_t max_z) { return {word(max_len), uniform(-max_z, max_z)}; }

  TreePoint tree_point(std::size_t max_len) {
    Word w = word(max_len);
    if (w.empty() || uniform(0, 2) == 0) return TreePoint::vertex(w);
    return TreePoint(w, Rational(uniform(1, 7), 8));
  }

  SpacePoint space_point(std::size_t max_len) { return {tree_point(max_len), Rational(uniform(-16, 16), 4)}; }
};

/// Maximum over pairs (g, a) in ball(L) with a . x0 within N of [x0, g . x0]
/// of the Y-side squared distance, straight from the definition.
inline Rational naive_minimal_M_sq(const ActionSpec& sx, const ActionSpec& sy, const Rational& N, std::int64_t L) {
  const auto B = ball(L);
  Rational best;
  const SpacePoint o{};
  for (const auto& g : B) {
    const SpacePoint gx = act(sx, g, o), gy = act(sy, g, o);
    for (const auto& a : B) {
      const SpacePoint ax = act(sx, a, o);
      if (N * N < piecewise_segment_min(ax, o, gx)) continue;
      best = max(best, piecewise_segment_min(act(sy, a, o), o, gy));
    }
  }
  return best;
}

}  // namespace oracle
