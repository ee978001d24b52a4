#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "cat0bd/errors.hpp"
#include "cat0bd/group_action.hpp"
#include "cat0bd/product_space.hpp"
#include "cat0bd/rational.hpp"
#include "cat0bd/word_group.hpp"

namespace cat0bd {

/// A pair (g, a) with a.x0 within N of [x0, g.x0]; squared distances exact.
struct StarWitness {
  GroupElement g;
  GroupElement a;
  Rational d_sq_x;
  Rational d_sq_y;
};

inline bool canonical_less(const StarWitness& p, const StarWitness& q) {
  if (p.g.to_string() != q.g.to_string()) return p.g.to_string() < q.g.to_string();
  return p.a.to_string() < q.a.to_string();
}

/// Outcome of checking condition (*) with g, a restricted to ball(L).
struct StarVerdict {
  bool holds_on_ball = true;
  std::int64_t L = 0;
  Rational N;
  std::optional<Rational> M;  ///< absent for a pure minimal-M scan
  /// Max over qualifying (g, a) of the Y-side squared distance: the square of
  /// the smallest M for which (*) holds on ball(L).
  Rational minimal_M_sq;
  std::optional<StarWitness> maximizer;
  std::vector<StarWitness> witnesses;  ///< Y-side distance exceeds M; canonical order
  std::uint64_t group_elements = 0;    ///< |ball(L)|
  std::uint64_t candidates_tested = 0;
  std::uint64_t qualifying_pairs = 0;
};

struct StarOptions {
  unsigned threads = 1;
  bool collect_witnesses = true;
};

namespace detail {

/// Squared distance from a point to a product segment of tree length `len`,
/// given the point's tree distance `delta` to the tree geodesic, the
/// projection parameter `sigma`, the point's height offset `e0` and the
/// segment's rise, all relative to the segment start.
template <class S>
S tent_segment_d2(const S& delta, const S& sigma, const S& len, const S& e0, const S& rise) {
  if (len == S(0)) {
    S t(0);
    if (rise != S(0)) t = scalar_min(S(1), scalar_max(S(0), e0 / rise));
    const S h = e0 - rise * t;
    return delta * delta + h * h;
  }
  return minimize_tent_quadratic(delta, sigma, e0, rise / len, std::optional<S>(len)).value;
}

/// Vertex near the tree path of [x0, g x0]: cur = c_j * branch with
/// c = u^-1 g u, at tree distance k from the path and projection j.
struct NearVertex {
  Word a_word;  ///< u cur u^-1
  std::int64_t j;
  std::int64_t k;
  Rational psi_x;
  Rational psi_y;
};

inline std::vector<NearVertex> near_path_vertices(const Word& c, const Word& u, std::int64_t depth,
                                                  std::int64_t L, const ActionSpec& sx, const ActionSpec& sy) {
  std::vector<NearVertex> out;
  const Word u_inv = u.inverse();
  Word cur;
  auto emit = [&](std::int64_t j, std::int64_t k) {
    Word a = u.empty() ? cur : (u * cur) * u_inv;
    if (static_cast<std::int64_t>(a.size()) > L) return;
    out.push_back({std::move(a), j, k, psi(sx, cur), psi(sy, cur)});
  };
  std::function<void(std::int64_t, std::int64_t)> branch = [&](std::int64_t j, std::int64_t k) {
    emit(j, k);
    if (k == depth) return;
    for (Letter l : kLetters) {
      if (cur.back() == inverse(l)) continue;
      cur.push(l);
      branch(j, k + 1);
      cur.pop();
    }
  };
  const auto len = static_cast<std::int64_t>(c.size());
  for (std::int64_t j = 0; j <= len; ++j) {
    emit(j, 0);
    if (depth > 0) {
      for (Letter l : kLetters) {
        if (j > 0 && l == inverse(c[static_cast<std::size_t>(j - 1)])) continue;
        if (j < len && l == c[static_cast<std::size_t>(j)]) continue;
        cur.push(l);
        branch(j, 1);
        cur.pop();
      }
    }
    if (j < len) cur.push(c[static_cast<std::size_t>(j)]);
  }
  return out;
}

struct ScanResult {
  std::uint64_t candidates = 0;
  std::uint64_t qualifying = 0;
  double best = -1;
  std::vector<StarWitness> near_best;  ///< exact values filled in later
  std::vector<StarWitness> witnesses;
};

inline constexpr double kScanTol = 1e-7;

struct ScanInput {
  const ActionSpec& sx;
  const ActionSpec& sy;
  Rational N;
  std::optional<Rational> M;
  std::int64_t L;
  const SpacePoint& bx;
  const SpacePoint& by;
  bool collect_witnesses;
};

inline Rational exact_y_d2(const ScanInput& in, const GroupElement& g, const GroupElement& a, const NearVertex& v,
                           std::int64_t len) {
  if (in.bx.tree.anchor == in.by.tree.anchor) {
    return tent_segment_d2(Rational(v.k), Rational(v.j), Rational(len),
                           Rational(a.z) * in.sy.z_shift + v.psi_y, height_shift(in.sy, g));
  }
  return dist_point_to_segment(act(in.sy, a, in.by), in.by, act(in.sy, g, in.by)).d_sq;
}

inline void scan_word(const ScanInput& in, const Word& w, ScanResult& res) {
  const Word& u = in.bx.tree.anchor;
  const Word c = (u.inverse() * w) * u;
  const auto len = static_cast<std::int64_t>(c.size());
  const std::int64_t depth = in.N.floor();
  const auto verts = near_path_vertices(c, u, depth, in.L, in.sx, in.sy);
  const bool same_tree = in.bx.tree.anchor == in.by.tree.anchor;
  const double n_sq = (in.N * in.N).to_double();
  const double m_sq = in.M ? (*in.M * *in.M).to_double() : 0.0;
  const double zx = in.sx.z_shift.to_double(), zy = in.sy.z_shift.to_double();
  const double psi_gx = psi(in.sx, w).to_double(), psi_gy = psi(in.sy, w).to_double();
  const std::int64_t slack = in.L - static_cast<std::int64_t>(w.size());

  GroupElement g{w, 0};
  for (std::int64_t gz = -slack; gz <= slack; ++gz) {
    g.z = gz;
    const Rational rise_x = height_shift(in.sx, g);
    const double rise_xd = zx * static_cast<double>(gz) + psi_gx;
    const double rise_yd = zy * static_cast<double>(gz) + psi_gy;
    // Height window for a.x0: the segment heights over the tree parameters
    // within N - k of the projection, widened by N. Only prunes, so the
    // window is rounded outwards.
    const double n_d = in.N.to_double();
    const double slope = len == 0 ? 0.0 : rise_xd / static_cast<double>(len);
    for (const auto& v : verts) {
      const auto a_slack = in.L - static_cast<std::int64_t>(v.a_word.size());
      const double px0 = v.psi_x.to_double();
      double lo, hi;
      if (len == 0) {
        lo = std::min(0.0, rise_xd) - n_d, hi = std::max(0.0, rise_xd) + n_d;
      } else {
        const double reach = n_d - static_cast<double>(v.k);
        const double t0 = std::max(0.0, static_cast<double>(v.j) - reach);
        const double t1 = std::min(static_cast<double>(len), static_cast<double>(v.j) + reach);
        lo = std::min(slope * t0, slope * t1) - n_d, hi = std::max(slope * t0, slope * t1) + n_d;
      }
      auto z_lo = static_cast<std::int64_t>(std::floor((lo - px0) / zx));
      auto z_hi = static_cast<std::int64_t>(std::ceil((hi - px0) / zx));
      z_lo = std::max(z_lo, -a_slack);
      z_hi = std::min(z_hi, a_slack);
      const double px = v.psi_x.to_double(), py = v.psi_y.to_double();
      for (std::int64_t az = z_lo; az <= z_hi; ++az) {
        ++res.candidates;
        const double e0 = zx * static_cast<double>(az) + px;
        const double dx = tent_segment_d2<double>(static_cast<double>(v.k), static_cast<double>(v.j),
                                                  static_cast<double>(len), e0, rise_xd);
        if (dx > n_sq + kScanTol) continue;
        std::optional<Rational> dx_exact;
        GroupElement a{v.a_word, az};
        if (dx > n_sq - kScanTol) {
          dx_exact = tent_segment_d2(Rational(v.k), Rational(v.j), Rational(len),
                                     Rational(az) * in.sx.z_shift + v.psi_x, rise_x);
          if (in.N * in.N < *dx_exact) continue;
        }
        ++res.qualifying;
        double dy;
        if (same_tree) {
          dy = tent_segment_d2<double>(static_cast<double>(v.k), static_cast<double>(v.j),
                                       static_cast<double>(len), zy * static_cast<double>(az) + py, rise_yd);
        } else {
          dy = dist_point_to_segment(to_float(act(in.sy, a, in.by)), to_float(in.by), to_float(act(in.sy, g, in.by)))
                   .d_sq;
        }
        auto exact_x = [&] {
          if (!dx_exact)
            dx_exact = tent_segment_d2(Rational(v.k), Rational(v.j), Rational(len),
                                       Rational(az) * in.sx.z_shift + v.psi_x, rise_x);
          return *dx_exact;
        };
        if (dy > res.best + kScanTol) {
          res.best = dy;
          res.near_best.clear();
        }
        if (dy > res.best - kScanTol) {
          res.near_best.push_back({g, a, exact_x(), exact_y_d2(in, g, a, v, len)});
        }
        if (in.M && in.collect_witnesses && dy > m_sq - kScanTol) {
          Rational dy_exact = exact_y_d2(in, g, a, v, len);
          if (*in.M * *in.M < dy_exact) res.witnesses.push_back({g, a, exact_x(), dy_exact});
        }
      }
    }
  }
}

inline void check_constants(const ActionSpec& sx, const ActionSpec& sy, const Rational& N,
                            const std::optional<Rational>& M, const SpacePoint& bx, const SpacePoint& by) {
  auto below = [](const Rational& v, const CoveringRadius& cr) {
    if (cr.value_sq) return v * v < *cr.value_sq;
    return v.to_double() < cr.value - kScanTol;
  };
  const auto cx = covering_radius(sx, bx);
  if (below(N, cx))
    throw InvalidConstants("N = " + N.to_string() + " is below the covering radius " + std::to_string(cx.value) +
                               " of the X action",
                           cx.value);
  if (M) {
    const auto cy = covering_radius(sy, by);
    if (below(*M, cy))
      throw InvalidConstants("M = " + M->to_string() + " is below the covering radius " + std::to_string(cy.value) +
                                 " of the Y action",
                             cy.value);
  }
}

inline StarVerdict run_scan(const ScanInput& in, const StarOptions& opts) {
  if (in.L < 1) throw std::invalid_argument("condition (*) check needs L >= 1");
  if (!in.bx.tree.is_vertex() || !in.by.tree.is_vertex())
    throw std::invalid_argument("condition (*) check needs vertex base points");
  check_constants(in.sx, in.sy, in.N, in.M, in.bx, in.by);

  std::vector<Word> words;
  for_each_word(static_cast<std::size_t>(in.L), [&](const Word& w) { words.push_back(w); });

  const unsigned nthreads = std::max(1u, opts.threads);
  std::vector<ScanResult> parts(nthreads);
  auto work = [&](unsigned t) {
    for (std::size_t i = t; i < words.size(); i += nthreads) scan_word(in, words[i], parts[t]);
  };
  if (nthreads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  StarVerdict v;
  v.L = in.L;
  v.N = in.N;
  v.M = in.M;
  v.group_elements = static_cast<std::uint64_t>(ball_size(in.L));
  std::vector<StarWitness> near;
  for (auto& p : parts) {
    v.candidates_tested += p.candidates;
    v.qualifying_pairs += p.qualifying;
    near.insert(near.end(), p.near_best.begin(), p.near_best.end());
    v.witnesses.insert(v.witnesses.end(), p.witnesses.begin(), p.witnesses.end());
  }
  std::sort(near.begin(), near.end(), canonical_less);
  for (const auto& w : near) {
    if (!v.maximizer || v.minimal_M_sq < w.d_sq_y) {
      v.minimal_M_sq = w.d_sq_y;
      v.maximizer = w;
    }
  }
  std::sort(v.witnesses.begin(), v.witnesses.end(), canonical_less);
  if (in.M) v.holds_on_ball = !(*in.M * *in.M < v.minimal_M_sq);
  return v;
}

}  // namespace detail

/// Checks (*) for all g, a in ball(L): whenever [x0, g x0] meets B(a x0, N)
/// (exact test), [y0, g y0] must meet B(a y0, M).
inline StarVerdict check_condition_star(const ActionSpec& specX, const ActionSpec& specY, const Rational& N,
                                        const Rational& M, std::int64_t L, const SpacePoint& baseX = {},
                                        const SpacePoint& baseY = {}, const StarOptions& opts = {}) {
  return detail::run_scan({specX, specY, N, M, L, baseX, baseY, opts.collect_witnesses}, opts);
}

/// Square of the smallest M making (*) hold on ball(L).
inline Rational minimal_M_on_ball(const ActionSpec& specX, const ActionSpec& specY, const Rational& N,
                                  std::int64_t L, const SpacePoint& baseX = {}, const SpacePoint& baseY = {},
                                  const StarOptions& opts = {}) {
  return detail::run_scan({specX, specY, N, std::nullopt, L, baseX, baseY, false}, opts).minimal_M_sq;
}

struct GrowthRow {
  std::int64_t i;
  GroupElement g;
  GroupElement a;
  Rational d_sq_x;
  Rational d_sq_y;
  bool meets_x;  ///< a x0 within N of [x0, g x0]
};

using WitnessFamily = std::function<std::pair<GroupElement, GroupElement>(std::int64_t)>;

/// g_i = (a^i b^i, 0), a_i = (a^i, 0).
inline std::pair<GroupElement, GroupElement> canonical_family(std::int64_t i) {
  const auto n = static_cast<std::size_t>(i);
  return {GroupElement(Word(std::string(n, 'a') + std::string(n, 'b')), 0), GroupElement(Word(std::string(n, 'a')), 0)};
}

/// Exact X- and Y-side squared distances from a_i . base to [base, g_i . base]
/// for i = 0..i_max.
inline std::vector<GrowthRow> witness_growth_scan(const ActionSpec& specX, const ActionSpec& specY, const Rational& N,
                                                  const WitnessFamily& family, std::int64_t i_max,
                                                  const SpacePoint& baseX = {}, const SpacePoint& baseY = {}) {
  std::vector<GrowthRow> rows;
  for (std::int64_t i = 0; i <= i_max; ++i) {
    auto [g, a] = family(i);
    Rational dx = dist_point_to_segment(act(specX, a, baseX), baseX, act(specX, g, baseX)).d_sq;
    Rational dy = dist_point_to_segment(act(specY, a, baseY), baseY, act(specY, g, baseY)).d_sq;
    rows.push_back({i, g, a, dx, dy, !(N * N < dx)});
  }
  return rows;
}

}  // namespace cat0bd
