#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "cat0bd/errors.hpp"
#include "cat0bd/product_space.hpp"
#include "cat0bd/rational.hpp"
#include "cat0bd/word_group.hpp"

namespace cat0bd {

/// Weighted-height action of G = F2 x Z on T x R:
///   (w, n) . (t, r) = (w t, r + n * z_shift + psi(w)),
/// psi the homomorphism with psi(a) = weight_a, psi(b) = weight_b.
struct ActionSpec {
  Rational weight_a;
  Rational weight_b;
  Rational z_shift{1};
  std::string name;

  ActionSpec() = default;
  ActionSpec(Rational wa, Rational wb, Rational zs, std::string label = {})
      : weight_a(wa), weight_b(wb), z_shift(zs), name(std::move(label)) {
    if (!(Rational(0) < z_shift)) throw std::invalid_argument("z_shift must be positive");
    if (name.empty()) name = "(" + wa.to_string() + "," + wb.to_string() + "," + zs.to_string() + ")";
  }

  static ActionSpec dot() { return {0, 0, 1, "dot"}; }
  static ActionSpec star() { return {0, 2, 1, "star"}; }
  static ActionSpec scaled2() { return {0, 0, 2, "scaled2"}; }

  /// Same action, compared by weights only.
  bool same_action(const ActionSpec& o) const {
    return weight_a == o.weight_a && weight_b == o.weight_b && z_shift == o.z_shift;
  }
};

inline std::optional<ActionSpec> preset_spec(std::string_view name) {
  if (name == "dot") return ActionSpec::dot();
  if (name == "star") return ActionSpec::star();
  if (name == "scaled2") return ActionSpec::scaled2();
  return std::nullopt;
}

/// Flat "key = value" text; '#' starts a comment. Keys: weight_a, weight_b,
/// z_shift (rationals as p/q), optional name.
inline ActionSpec parse_spec_config(std::string_view text, std::string fallback_name = {}) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto get = [&](const char* key, Rational dflt) {
    auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    Rational v = Rational::parse(it->second);
    kv.erase(it);
    return v;
  };
  Rational wa = get("weight_a", 0), wb = get("weight_b", 0), zs = get("z_shift", 1);
  std::string name = std::move(fallback_name);
  if (auto it = kv.find("name"); it != kv.end()) {
    name = it->second;
    kv.erase(it);
  }
  if (!kv.empty()) throw std::invalid_argument("unknown config key '" + kv.begin()->first + "'");
  return ActionSpec(wa, wb, zs, name);
}

/// Preset name or path to a config file.
inline ActionSpec load_spec(const std::string& name_or_path) {
  if (auto p = preset_spec(name_or_path)) return *p;
  std::ifstream f(name_or_path);
  if (!f) throw std::invalid_argument("'" + name_or_path + "' is neither a preset (dot, star, scaled2) nor a readable file");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_spec_config(buf.str(), name_or_path);
}

inline Rational psi(const ActionSpec& spec, const Word& w) {
  std::int64_t ea = 0, eb = 0;
  for (char c : w.str()) {
    switch (c) {
      case 'a': ++ea; break;
      case 'A': --ea; break;
      case 'b': ++eb; break;
      case 'B': --eb; break;
    }
  }
  return spec.weight_a * Rational(ea) + spec.weight_b * Rational(eb);
}

/// Height displacement of g.
inline Rational height_shift(const ActionSpec& spec, const GroupElement& g) {
  return Rational(g.z) * spec.z_shift + psi(spec, g.word);
}

/// Left multiplication on T. An edge-interior point is carried along its
/// edge; if the image edge points back towards the root the offset flips.
template <class S>
BasicTreePoint<S> act_tree(const Word& g, const BasicTreePoint<S>& p) {
  if (p.is_vertex()) return BasicTreePoint<S>::vertex(g * p.anchor);
  Word parent = p.anchor.prefix(p.anchor.size() - 1);
  Word child_img = g * p.anchor;
  Word parent_img = g * parent;
  if (child_img.size() == parent_img.size() + 1) return BasicTreePoint<S>(std::move(child_img), p.offset);
  return BasicTreePoint<S>(std::move(parent_img), S(1) - p.offset);
}

inline SpacePoint act(const ActionSpec& spec, const GroupElement& g, const SpacePoint& p) {
  return {act_tree(g.word, p.tree), p.height + height_shift(spec, g)};
}

inline SpacePointF act(const ActionSpec& spec, const GroupElement& g, const SpacePointF& p) {
  return {act_tree(g.word, p.tree), p.height + height_shift(spec, g).to_double()};
}

/// Weighted-height isometries fix slopes and move ends by left multiplication.
inline BoundaryPoint act_boundary(const ActionSpec&, const GroupElement& g, const BoundaryPoint& alpha) {
  if (alpha.is_pole()) return alpha;
  return BoundaryPoint::directional(alpha.dir().end.left_multiply(g.word), alpha.dir().slope);
}

/// Limit of g^n . base in the boundary.
inline BoundaryPoint orbit_limit(const ActionSpec& spec, const GroupElement& g, const SpacePoint& = {}) {
  if (g.is_identity()) throw NoLimit("orbit_limit: identity has a bounded orbit");
  auto [u, core] = cyclic_reduce(g.word);
  if (core.empty()) {
    // Elliptic on T: g^n fixes the vertex u and only translates heights.
    const Rational shift = height_shift(spec, g);
    if (shift == Rational(0)) throw NoLimit("orbit_limit: element acts with bounded orbit");
    return BoundaryPoint::pole(shift.sign());
  }
  const Rational slope = height_shift(spec, g) / Rational(static_cast<std::int64_t>(core.size()));
  return BoundaryPoint::directional(TreeEnd(u, core), slope);
}

/// Covering radius of the orbit of a vertex base point.
struct CoveringRadius {
  double value;
  bool exact;
  std::optional<Rational> value_sq;  ///< set when exact
};

namespace detail {

inline Rational mod_positive(Rational x, const Rational& m) {
  Rational q((x / m).floor());
  return x - q * m;
}

/// Distance from height h to the coset c + zeta Z (c in [0, zeta)).
inline double coset_gap(double h, double c, double zeta) {
  double x = std::fmod(h - c, zeta);
  if (x < 0) x += zeta;
  return std::min(x, zeta - x);
}

}  // namespace detail

inline CoveringRadius covering_radius(const ActionSpec& spec, const SpacePoint& base = {}) {
  if (!base.tree.is_vertex()) throw std::invalid_argument("covering_radius: base must be a vertex");
  const Rational zeta = spec.z_shift;
  const Rational ra = detail::mod_positive(spec.weight_a, zeta);
  const Rational rb = detail::mod_positive(spec.weight_b, zeta);
  if (ra == Rational(0) && rb == Rational(0)) {
    // Every vertex carries heights base.height + zeta Z; the farthest points
    // are edge midpoints at half-period heights.
    Rational sq = Rational(1, 4) + zeta * zeta / Rational(4);
    return {std::sqrt(sq.to_double()), true, sq};
  }

  // Mixed height classes: maximize over a fundamental domain, the edge from
  // the identity towards each letter, times one height period. Only the
  // height class mod zeta of each nearby vertex matters.
  const double z = zeta.to_double();
  const double reach = std::sqrt(1.0 + z * z) / 2.0 + 1.0;
  struct Near {
    double tree_extra;  // tree distance beyond the point's own edge endpoint
    double cls;
  };
  // Vertices reachable from the identity without first crossing `skip`.
  auto classes_from = [&](const Word& root, std::optional<Letter> skip) {
    std::vector<Near> out;
    std::set<std::pair<std::int64_t, Rational>> seen;
    std::vector<std::pair<Word, std::int64_t>> frontier{{root, 0}};
    while (!frontier.empty()) {
      auto [w, k] = frontier.back();
      frontier.pop_back();
      Rational cls = detail::mod_positive(psi(spec, w), zeta);
      if (seen.insert({k, cls}).second) out.push_back({static_cast<double>(k), cls.to_double()});
      if (static_cast<double>(k + 1) > reach) continue;
      for (Letter l : kLetters) {
        if (k == 0 && skip && l == *skip) continue;
        if (!w.empty() && w.back() == inverse(l)) continue;
        Word next = w;
        next.push(l);
        frontier.push_back({std::move(next), k + 1});
      }
    }
    return out;
  };

  double best = 0.0;
  const int grid = 96;
  for (Letter x : kLetters) {
    const Word xw = Word::from_letters(std::span<const Letter>(&x, 1));
    auto near_e = classes_from(Word(), x);
    auto near_x = classes_from(xw, inverse(x));
    auto dist_at = [&](double s, double h) {
      double d2 = 1e300;
      for (const auto& n : near_e) {
        double t = s + n.tree_extra, g = detail::coset_gap(h, n.cls, z);
        d2 = std::min(d2, t * t + g * g);
      }
      for (const auto& n : near_x) {
        double t = (1.0 - s) + n.tree_extra, g = detail::coset_gap(h, n.cls, z);
        d2 = std::min(d2, t * t + g * g);
      }
      return d2;
    };
    std::vector<std::tuple<double, double, double>> cells;
    for (int i = 0; i <= grid; ++i)
      for (int j = 0; j < grid; ++j) {
        double s = static_cast<double>(i) / grid, h = z * j / grid;
        cells.emplace_back(dist_at(s, h), s, h);
      }
    std::partial_sort(cells.begin(), cells.begin() + 8, cells.end(), std::greater<>());
    for (int c = 0; c < 8; ++c) {
      auto [v, s, h] = cells[static_cast<std::size_t>(c)];
      double step_s = 1.0 / grid, step_h = z / grid;
      while (step_s > 1e-12) {
        bool moved = false;
        for (auto [ds, dh] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}) {
          double s2 = std::clamp(s + ds * step_s, 0.0, 1.0), h2 = h + dh * step_h;
          double v2 = dist_at(s2, h2);
          if (v2 > v) {
            v = v2, s = s2, h = h2;
            moved = true;
          }
        }
        if (!moved) step_s /= 2, step_h /= 2;
      }
      best = std::max(best, v);
    }
  }
  return {std::sqrt(best), false, std::nullopt};
}

/// The named constants of the boundary-map construction, with every derived
/// constant recomputed from (N, M, lambda, C).
struct ConstantsLedger {
  Rational N, M, lambda, C;
  Rational N_tilde, M_tilde, M_prime, c_bar;

  static ConstantsLedger make(Rational N, Rational M, Rational lambda, Rational C) {
    ConstantsLedger l;
    l.N = N, l.M = M, l.lambda = lambda, l.C = C;
    l.N_tilde = Rational(2) * N;
    l.M_tilde = lambda * (N + l.N_tilde) + C + M;
    l.M_prime = lambda * (Rational(2) * N + Rational(1)) + Rational(2) * M + C;
    l.c_bar = lambda * (Rational(2) * N + Rational(3)) + C + Rational(2) * (l.M_tilde + Rational(1));
    l.verify();
    return l;
  }

  /// Throws if a derived constant disagrees with its formula.
  void verify() const {
    if (N < Rational(0) || M < Rational(0) || C < Rational(0) || lambda < Rational(1))
      throw std::invalid_argument("ledger needs N, M, C >= 0 and lambda >= 1");
    auto check = [](const Rational& got, const Rational& want, const char* what) {
      if (got != want) throw std::logic_error(std::string("ledger: ") + what + " disagrees with its formula");
    };
    check(N_tilde, Rational(2) * N, "N_tilde");
    check(M_tilde, lambda * (N + N_tilde) + C + M, "M_tilde");
    check(M_prime, lambda * (Rational(2) * N + Rational(1)) + Rational(2) * M + C, "M_prime");
    check(c_bar, lambda * (Rational(2) * N + Rational(3)) + C + Rational(2) * (M_tilde + Rational(1)), "c_bar");
  }

  /// X-side radius guaranteeing Y-side closeness r_bar in the continuity argument.
  Rational continuity_r(const Rational& r_bar) const {
    return lambda * (r_bar + C + M_tilde + Rational(1)) + N + Rational(1);
  }
  /// X-side radius used when bounding the Y-side spread at radius R.
  Rational spread_r(const Rational& R) const { return lambda * (R + C + M) + N; }
  /// Radius around the image sequence that covers the image ray.
  Rational image_cover_radius() const {
    return Rational(3) * (M_tilde + Rational(1)) + lambda * (Rational(2) * N + Rational(1)) + C;
  }
  /// Lower bound on Y-side separation once X-side rays are t apart.
  Rational separation_bound(const Rational& t) const {
    return (t - Rational(2) * N) / lambda - C -
           (Rational(4) * (M_tilde + Rational(1)) + lambda * (Rational(2) * N + Rational(1)) + C);
  }
};

}  // namespace cat0bd
