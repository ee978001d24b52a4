#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cat0bd/boundary_topology.hpp"
#include "cat0bd/condition_star.hpp"
#include "cat0bd/errors.hpp"
#include "cat0bd/group_action.hpp"
#include "cat0bd/product_space.hpp"
#include "cat0bd/rational.hpp"
#include "cat0bd/word_group.hpp"

namespace cat0bd {

struct Bases {
  SpacePoint x;
  SpacePoint y;
};

// ---------------------------------------------------------------------------
// Quasi-isometry constants of g x0 -> g y0

struct QiEstimate {
  Rational lambda;
  Rational C;
  std::int64_t L = 0;
  bool found = false;
  std::uint64_t pairs = 0;            ///< |ball(L)|^2 ordered pairs covered
  std::uint64_t distance_classes = 0;  ///< distinct (d_X^2, d_Y^2) among them
};

namespace detail {

/// sqrt(a2) <= lam * sqrt(b2) + k, exactly (lam, k >= 0).
inline bool sqrt_le_affine(const Rational& a2, const Rational& b2, const Rational& lam, const Rational& k) {
  const Rational lhs = a2 - lam * lam * b2 - k * k;
  if (!(Rational(0) < lhs)) return true;
  // Both sides of lhs <= 2 lam k sqrt(b2) are nonnegative; square again.
  const Rational rhs_factor = Rational(2) * lam * k;
  return lhs * lhs <= rhs_factor * rhs_factor * b2;
}

inline bool qi_holds(const std::set<std::pair<Rational, Rational>>& classes, const Rational& lam, const Rational& c) {
  for (const auto& [dx2, dy2] : classes) {
    if (!sqrt_le_affine(dx2, dy2, lam, c)) return false;       // d_X <= lam d_Y + C
    if (!sqrt_le_affine(dy2, dx2, lam, lam * c)) return false;  // d_Y / lam - C <= d_X
  }
  return true;
}

}  // namespace detail

/// Smallest constants on the 1/8 grid (lambda in [1, 8], C in [0, 16]) for
/// which the quasi-isometry inequalities hold on every pair of ball(L). The
/// additive constant is minimized first, then lambda.
inline QiEstimate qi_constants(const ActionSpec& specX, const ActionSpec& specY, std::int64_t L,
                               const Bases& bases = {}) {
  if (L < 2) throw std::invalid_argument("qi_constants needs L >= 2");
  // d(g x0, h x0) = d(x0, g^-1 h x0) and {g^-1 h} = ball(2L) for a word metric,
  // so the pair distances are exactly the base distances over ball(2L).
  std::set<std::pair<Rational, Rational>> classes;
  const Word& ux = bases.x.tree.anchor;
  const Word& uy = bases.y.tree.anchor;
  const std::int64_t R = 2 * L;
  for_each_word(static_cast<std::size_t>(R), [&](const Word& w) {
    const Rational tx(static_cast<std::int64_t>(((ux.inverse() * w) * ux).size()));
    const Rational ty(static_cast<std::int64_t>(((uy.inverse() * w) * uy).size()));
    const Rational px = psi(specX, w), py = psi(specY, w);
    const std::int64_t slack = R - static_cast<std::int64_t>(w.size());
    for (std::int64_t z = -slack; z <= slack; ++z) {
      const Rational hx = Rational(z) * specX.z_shift + px, hy = Rational(z) * specY.z_shift + py;
      classes.emplace(tx * tx + hx * hx, ty * ty + hy * hy);
    }
  });

  QiEstimate est;
  est.L = L;
  est.pairs = static_cast<std::uint64_t>(ball_size(L)) * static_cast<std::uint64_t>(ball_size(L));
  est.distance_classes = classes.size();
  const Rational step(1, 8);
  const std::int64_t lam_steps = 56, c_steps = 128;  // lambda = 1 + i/8, C = j/8
  for (std::int64_t j = 0; j <= c_steps; ++j) {
    const Rational c = step * j;
    if (!detail::qi_holds(classes, Rational(8), c)) continue;
    std::int64_t lo = 0, hi = lam_steps;  // feasible at hi
    while (lo < hi) {
      const std::int64_t mid = (lo + hi) / 2;
      if (detail::qi_holds(classes, Rational(1) + step * mid, c)) hi = mid;
      else lo = mid + 1;
    }
    est.lambda = Rational(1) + step * lo;
    est.C = c;
    est.found = true;
    // Re-verify the returned pair against every class.
    if (!detail::qi_holds(classes, est.lambda, est.C)) throw std::logic_error("qi_constants: re-verification failed");
    return est;
  }
  return est;
}

// ---------------------------------------------------------------------------
// Approximating sequences and the boundary map

/// Vertices of T within tree distance R of p.
inline std::vector<Word> vertices_within(const TreePointF& p, double R) {
  std::vector<Word> out;
  const auto hops = static_cast<std::int64_t>(std::floor(R)) + 1;
  Word v = p.anchor;
  std::function<void(std::int64_t, std::optional<Letter>)> walk = [&](std::int64_t depth,
                                                                      std::optional<Letter> came_by) {
    const TreePointF vp = TreePointF::vertex(v);
    if (tree_dist(p, vp) <= R + kMetricTol) out.push_back(v);
    if (depth == hops) return;
    for (Letter l : kLetters) {
      if (came_by && l == inverse(*came_by)) continue;
      Word saved = v;
      v.push(l);
      walk(depth + 1, l);
      v = std::move(saved);
    }
  };
  walk(0, std::nullopt);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

enum class ChoiceRule {
  Nearest,  ///< minimize d^2, ties broken by serialization
  Seeded,   ///< uniform among all qualifying elements (for independent sequences)
};

struct ApproxOptions {
  ChoiceRule rule = ChoiceRule::Nearest;
  std::uint64_t seed = 0;
};

/// Group elements within distance N of the ray point xi_alpha(i).
inline std::vector<std::pair<double, GroupElement>> cover_candidates(const SpacePointF& target, const ActionSpec& spec,
                                                                     const Rational& N, const SpacePoint& base) {
  if (!base.tree.is_vertex()) throw std::invalid_argument("approximating_sequence: base must be a vertex");
  const double n = N.to_double();
  const double n_sq = n * n;
  const double zeta = spec.z_shift.to_double();
  const Word u_inv = base.tree.anchor.inverse();
  std::vector<std::pair<double, GroupElement>> out;
  for (const Word& v : vertices_within(target.tree, n)) {
    const double dt = tree_dist(target.tree, TreePointF::vertex(v));
    const double room = std::sqrt(std::max(0.0, n_sq - dt * dt));
    Word gw = v * u_inv;
    const double h0 = base.height.to_double() + psi(spec, gw).to_double();
    const auto z_lo = static_cast<std::int64_t>(std::floor((target.height - room - h0) / zeta)) - 1;
    const auto z_hi = static_cast<std::int64_t>(std::ceil((target.height + room - h0) / zeta)) + 1;
    for (std::int64_t z = z_lo; z <= z_hi; ++z) {
      const double dh = h0 + zeta * static_cast<double>(z) - target.height;
      const double d2 = dt * dt + dh * dh;
      if (d2 <= n_sq + kMetricTol) out.push_back({d2, GroupElement(gw, z)});
    }
  }
  return out;
}

/// g_1..g_k with d(g_i . base, xi_alpha(i)) <= N.
inline std::vector<GroupElement> approximating_sequence(const BoundaryPoint& alpha, const ActionSpec& spec,
                                                        const Rational& N, std::int64_t k, const SpacePoint& base = {},
                                                        const ApproxOptions& opts = {}) {
  if (k < 1) throw std::invalid_argument("approximating_sequence needs k >= 1");
  const GeodesicRay ray{base, alpha};
  std::vector<GroupElement> seq;
  seq.reserve(static_cast<std::size_t>(k));
  for (std::int64_t i = 1; i <= k; ++i) {
    const SpacePointF target = ray_eval(ray, static_cast<double>(i));
    auto cands = cover_candidates(target, spec, N, base);
    if (cands.empty())
      throw NoCover("no group element within N = " + N.to_string() + " of the ray point at arclength " +
                    std::to_string(i) + "; N is below the covering radius");
    std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) { return x.second < y.second; });
    if (opts.rule == ChoiceRule::Nearest) {
      const auto* best = &cands.front();
      for (const auto& c : cands)
        if (c.first < best->first - 1e-12) best = &c;
      seq.push_back(best->second);
    } else {
      std::mt19937_64 rng(opts.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(i));
      seq.push_back(cands[static_cast<std::size_t>(rng() % cands.size())].second);
    }
  }
  return seq;
}

/// A group element whose orbit limit under `spec` is alpha: (p c^m p^-1, n)
/// with n/m chosen to match the slope.
inline GroupElement representing_element(const BoundaryPoint& alpha, const ActionSpec& spec) {
  if (alpha.is_pole()) return GroupElement(Word(), alpha.pole_sign());
  const auto& d = alpha.dir();
  const Word& p = d.end.prefix();
  const Word& c = d.end.period();
  const Rational q = (d.slope * Rational(static_cast<std::int64_t>(c.size())) - psi(spec, c)) / spec.z_shift;
  const std::int64_t m = q.den(), n = q.num();
  Word body;
  for (std::int64_t r = 0; r < m; ++r) body = body * c;
  return GroupElement((p * body) * p.inverse(), n);
}

/// Closed-form boundary map for weighted-height actions: read the image off
/// the orbit limit, under the Y action, of an element representing alpha.
inline BoundaryPoint analytic_phibar(const BoundaryPoint& alpha, const ActionSpec& specX, const ActionSpec& specY) {
  const GroupElement rep = representing_element(alpha, specX);
  if (!(orbit_limit(specX, rep) == alpha)) throw std::logic_error("representing_element: orbit limit mismatch");
  return orbit_limit(specY, rep);
}

struct PhibarOptions {
  std::int64_t k = 24;
  bool extend = true;  ///< lengthen the sequence when alpha needs more depth
  /// Cauchy constant for the image test; 0 picks M' from the ledger when given,
  /// otherwise 2 * (largest consecutive image step) + 1.
  double epsilon0 = 0;
  std::vector<double> r_values = default_r_values();
  bool star_verified = false;  ///< caller checked (*) for this pair of actions
  ApproxOptions approx;
};

struct PhibarResult {
  BoundaryPoint input;
  std::vector<GroupElement> sequence;
  BoundaryPoint output;
  std::optional<BoundaryPoint> analytic_crosscheck;
  std::int64_t k_used = 0;
  double epsilon0 = 0;
  CauchyVerdict image_cauchy;
  bool unverified = true;  ///< (*) not confirmed by the caller
};

/// Sequence length that makes the tail deep enough to read alpha's end.
inline std::int64_t recommended_length(const BoundaryPoint& alpha, std::int64_t k) {
  if (alpha.is_pole()) return k;
  const auto& d = alpha.dir();
  const double stretch = std::sqrt(1.0 + d.slope.to_double() * d.slope.to_double());
  const double depth = 2.0 * static_cast<double>(d.end.prefix().size() + 2 * d.end.period().size()) + 6.0;
  return std::max(k, static_cast<std::int64_t>(std::ceil(2.0 * stretch * depth)));
}

inline constexpr std::int64_t kMaxSequenceLength = 1 << 14;

/// Approximating sequence for alpha (under specX) and the limit of the same
/// elements acting on `base` under `spec`. With `extend`, the sequence doubles
/// until the slope window isolates the extracted rational.
inline std::pair<std::vector<GroupElement>, LimitEstimate> sequence_and_limit(
    const BoundaryPoint& alpha, const ActionSpec& specX, const Rational& N, const ActionSpec& spec,
    const Bases& bases, const SpacePoint& base, std::int64_t k, bool extend, const ApproxOptions& approx) {
  if (extend) k = recommended_length(alpha, k);
  while (true) {
    auto seq = approximating_sequence(alpha, specX, N, k, bases.x, approx);
    auto est = estimate_orbit_limit(seq, spec, base);
    if (!extend || est.resolved()) return {std::move(seq), est};
    if (2 * k > kMaxSequenceLength)
      throw NotConvergent("slope of the limit does not resolve by k = " + std::to_string(k),
                          static_cast<double>(k));
    k *= 2;
  }
}

inline PhibarResult phibar(const BoundaryPoint& alpha, const ActionSpec& specX, const ActionSpec& specY,
                           const Rational& N, const Bases& bases = {}, const PhibarOptions& opts = {},
                           const std::optional<ConstantsLedger>& ledger = std::nullopt) {
  auto [seq, est] = sequence_and_limit(alpha, specX, N, specY, bases, bases.y, opts.k, opts.extend, opts.approx);
  const auto k = static_cast<std::int64_t>(seq.size());

  std::vector<SpacePoint> image;
  image.reserve(seq.size());
  for (const auto& g : seq) image.push_back(act(specY, g, bases.y));
  double eps0 = opts.epsilon0;
  if (eps0 <= 0) {
    if (ledger) {
      eps0 = ledger->M_prime.to_double();
    } else {
      double step = 0;
      for (std::size_t i = 0; i + 1 < image.size(); ++i) step = std::max(step, dist(image[i], image[i + 1]));
      eps0 = 2 * step + 1;
    }
  }
  auto verdict = is_cauchy_sample(image, eps0, opts.r_values, bases.y);
  if (!verdict.consistent) {
    const auto& w = *verdict.witness;
    throw NotCauchy("image sequence leaves U(x_i; r, eps0) at r = " + std::to_string(w.r) + ", i = " +
                    std::to_string(w.i) + ", j = " + std::to_string(w.j));
  }
  const BoundaryPoint& out = est.point;
  const BoundaryPoint expected = analytic_phibar(alpha, specX, specY);
  if (!(out == expected))
    throw CrosscheckMismatch("phibar(" + alpha.to_string() + "): sequence limit " + out.to_string() +
                             " disagrees with the closed form " + expected.to_string());
  return {alpha, std::move(seq), out, expected, k, eps0, std::move(verdict), !opts.star_verified};
}

/// Random boundary points with short ends (|prefix| + 2|period| <= 4) and
/// slopes in {0, +-1/2, +-1, +-2}; about one in ten is a pole.
inline std::vector<BoundaryPoint> sample_boundary_points(std::size_t count, std::uint64_t seed) {
  static const Rational slopes[] = {Rational(0),    Rational(1, 2), Rational(-1, 2), Rational(1),
                                    Rational(-1),   Rational(2),    Rational(-2)};
  std::mt19937_64 rng(seed);
  std::vector<BoundaryPoint> out;
  auto random_reduced = [&](std::size_t len, std::optional<Letter> after) {
    Word w;
    while (w.size() < len) {
      Letter l = kLetters[static_cast<std::size_t>(rng() % 4)];
      std::optional<Letter> prev = w.empty() ? after : std::optional<Letter>(w.back());
      if (prev && l == inverse(*prev)) continue;
      w.push(l);
    }
    return w;
  };
  while (out.size() < count) {
    if (rng() % 10 == 0) {
      out.push_back(BoundaryPoint::pole(rng() % 2 ? 1 : -1));
      continue;
    }
    const std::size_t c = 1 + rng() % 2;
    const std::size_t p = rng() % (5 - 2 * c);
    Word prefix = random_reduced(p, std::nullopt);
    Word period = random_reduced(c, prefix.empty() ? std::nullopt : std::optional<Letter>(prefix.back()));
    if (!is_cyclically_reduced(period)) continue;
    out.push_back(BoundaryPoint::directional(TreeEnd(prefix, period), slopes[rng() % 7]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Constants ledger from computed quantities

/// Ledger with lambda, C from qi_constants(L_qi); M given, or the smallest
/// multiple of 1/8 at least the minimal M on ball(L_star).
inline ConstantsLedger derive_ledger(const ActionSpec& specX, const ActionSpec& specY, const Rational& N,
                                     std::optional<Rational> M, std::int64_t L_qi = 6, std::int64_t L_star = 8,
                                     const Bases& bases = {}, unsigned threads = 1) {
  const QiEstimate qi = qi_constants(specX, specY, L_qi, bases);
  if (!qi.found) throw std::runtime_error("no quasi-isometry constants on the search grid");
  if (!M) {
    StarOptions so;
    so.threads = threads;
    const Rational m_sq = minimal_M_on_ball(specX, specY, N, L_star, bases.x, bases.y, so);
    const auto cy = covering_radius(specY, bases.y);
    Rational m = ceil_sqrt_on_grid(m_sq, Rational(1, 8));
    while (m.to_double() < cy.value) m += Rational(1, 8);
    M = m;
  }
  return ConstantsLedger::make(N, *M, qi.lambda, qi.C);
}

// ---------------------------------------------------------------------------
// Verification suite

/// One of the six near-identity inequalities: worst observed squared distance
/// against the squared bound.
struct BoundCheck {
  int item;
  Rational bound;
  Rational worst_sq;
  Rational margin_sq;  ///< bound^2 - worst_sq
  bool holds;
};

inline BoundCheck make_bound(int item, const Rational& bound, const Rational& worst_sq) {
  const Rational margin = bound * bound - worst_sq;
  return {item, bound, worst_sq, margin, !(margin < Rational(0))};
}

/// Checks the six near-identity inequalities over the first i_max elements of
/// the sequence.
inline std::vector<BoundCheck> near_identity_bounds(const PhibarResult& result, const ConstantsLedger& ledger,
                                               const ActionSpec& specX, const ActionSpec& specY,
                                               const Bases& bases = {}, std::int64_t i_max = 12,
                                               const Rational& grid_step = Rational(1, 4)) {
  ledger.verify();
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(i_max), result.sequence.size());
  std::vector<SpacePoint> gx, gy;
  for (std::size_t i = 0; i < n; ++i) {
    gx.push_back(act(specX, result.sequence[i], bases.x));
    gy.push_back(act(specY, result.sequence[i], bases.y));
  }
  Rational w1, w2, w3, w4, w5, w6;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      w1 = max(w1, dist_point_to_segment(gx[i], bases.x, gx[j]).d_sq);
      w2 = max(w2, dist_point_to_segment(gy[i], bases.y, gy[j]).d_sq);
    }
  Rational tau_max;
  for (std::size_t i = 0; i < n; ++i) {
    auto m = dist_point_to_ray(gy[i], bases.y, result.output);
    w3 = max(w3, m.value);
    tau_max = max(tau_max, m.param);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w4 = max(w4, dist_sq(gx[i], gx[i + 1]));
    w5 = max(w5, dist_sq(gy[i], gy[i + 1]));
  }
  const GeodesicRay ray{bases.y, result.output};
  for (Rational tau; !(tau_max < tau); tau += grid_step) {
    const SpacePoint p = ray_eval_tree_param(ray, tau);
    std::optional<Rational> nearest;
    for (const auto& q : gy) {
      Rational d = dist_sq(p, q);
      if (!nearest || d < *nearest) nearest = d;
    }
    if (nearest) w6 = max(w6, *nearest);
  }
  const Rational two_n1 = Rational(2) * ledger.N + Rational(1);
  return {
      make_bound(1, ledger.N_tilde, w1),
      make_bound(2, ledger.M_tilde, w2),
      make_bound(3, ledger.M_tilde + Rational(1), w3),
      make_bound(4, two_n1, w4),
      make_bound(5, ledger.lambda * two_n1 + ledger.C, w5),
      make_bound(6, ledger.image_cover_radius(), w6),
  };
}

/// Y-side spread at radius R for a Cauchy X-side orbit sample.
/// Name kept for callers of the original interface.
inline std::vector<BoundCheck> lemma_2_5_suite(const PhibarResult& result, const ConstantsLedger& ledger,
                                               const ActionSpec& specX, const ActionSpec& specY,
                                               const Bases& bases = {}, std::int64_t i_max = 12,
                                               const Rational& grid_step = Rational(1, 4)) {
  return near_identity_bounds(result, ledger, specX, specY, bases, i_max, grid_step);
}

struct SpreadCheck {
  double R;
  Rational r;  ///< X-side radius lambda (R + C + M) + N
  std::optional<std::size_t> i0;
  double spread = 0;  ///< max d(xi_{g_i0 y0}(R), xi_{g_i y0}(R)) over i >= i0
  double bound = 0;   ///< M'
  bool holds = false;
};

inline std::vector<SpreadCheck> image_spread_check(const BoundaryPoint& alpha, const ActionSpec& specX,
                                                const ActionSpec& specY, const ConstantsLedger& ledger,
                                                const std::vector<double>& R_values, const Bases& bases = {},
                                                std::int64_t tail = 16) {
  std::vector<SpreadCheck> out;
  for (double R : R_values) {
    SpreadCheck sc;
    sc.R = R;
    sc.r = ledger.spread_r(simplest_between(R, R));
    sc.bound = ledger.M_prime.to_double();
    const double r = sc.r.to_double();
    const auto k = static_cast<std::int64_t>(std::ceil(r + ledger.N.to_double())) + 1 + tail;
    auto seq = approximating_sequence(alpha, specX, ledger.N, k, bases.x);
    std::vector<SpacePoint> px, py;
    for (const auto& g : seq) {
      px.push_back(act(specX, g, bases.x));
      py.push_back(act(specY, g, bases.y));
    }
    // X side: first i0 with every later sample in U(g_i0 x0; r, 1).
    for (std::size_t i0 = 0; i0 + 1 < seq.size() && !sc.i0; ++i0) {
      bool ok = true;
      const auto a = point_at_arclength(bases.x, px[i0], r);
      for (std::size_t j = i0; j < seq.size() && ok; ++j)
        ok = dist(bases.x, px[j]) >= r - kMetricTol &&
             dist(a, point_at_arclength(bases.x, px[j], r)) <= 1 + kMetricTol;
      if (ok) sc.i0 = i0;
    }
    if (sc.i0) {
      bool reach = true;
      const auto b = point_at_arclength(bases.y, py[*sc.i0], R);
      for (std::size_t j = *sc.i0; j < seq.size(); ++j) {
        reach = reach && dist(bases.y, py[j]) >= R - kMetricTol;
        sc.spread = std::max(sc.spread, dist(b, point_at_arclength(bases.y, py[j], R)));
      }
      sc.holds = reach && sc.spread <= sc.bound + kMetricTol;
    }
    out.push_back(sc);
  }
  return out;
}

/// Interleaves two independently chosen approximating sequences for alpha
/// and compares the three image limits.
struct WellDefinedCheck {
  BoundaryPoint from_nearest;
  BoundaryPoint from_seeded;
  BoundaryPoint from_interleaved;
  bool holds;
};

inline WellDefinedCheck well_definedness_check(const BoundaryPoint& alpha, const ActionSpec& specX,
                                               const ActionSpec& specY, const Rational& N, std::uint64_t seed,
                                               const Bases& bases = {}, std::int64_t k = 24) {
  k = recommended_length(alpha, k);
  while (true) {
    auto a = approximating_sequence(alpha, specX, N, k, bases.x);
    auto b = approximating_sequence(alpha, specX, N, k, bases.x, {ChoiceRule::Seeded, seed});
    std::vector<GroupElement> mixed;
    for (std::size_t i = 0; i < a.size(); ++i) {
      mixed.push_back(a[i]);
      mixed.push_back(b[i]);
    }
    auto la = estimate_orbit_limit(a, specY, bases.y);
    auto lb = estimate_orbit_limit(b, specY, bases.y);
    auto lm = estimate_orbit_limit(mixed, specY, bases.y);
    if ((la.resolved() && lb.resolved() && lm.resolved()) || 2 * k > kMaxSequenceLength) {
      const bool holds = la.resolved() && lb.resolved() && lm.resolved() && la.point == lb.point &&
                         lb.point == lm.point;
      return {la.point, lb.point, lm.point, holds};
    }
    k *= 2;
  }
}

struct ContinuitySample {
  BoundaryPoint beta;
  BoundaryPoint beta_bar;
  bool beta_in_U;        ///< beta in U(alpha; r, 1), as sampled
  double distance;       ///< d(xi_alpha_bar(r_bar), Image xi_beta_bar)
  bool image_in_U_prime; ///< beta_bar in U'(alpha_bar; r_bar, c_bar)
};

struct ContinuityReport {
  BoundaryPoint alpha;
  BoundaryPoint alpha_bar;
  Rational r_bar;
  Rational r;
  Rational c_bar;
  std::vector<ContinuitySample> samples;
  bool holds = true;
};

/// Boundary points in U(alpha; r, 1): ends agreeing with alpha's past the
/// tree depth of xi_alpha(r) with alpha's slope; near a pole, steep
/// integer slopes.
inline std::vector<BoundaryPoint> sample_neighbors(const BoundaryPoint& alpha, const Rational& r, std::size_t count,
                                                   std::uint64_t seed, const SpacePoint& base = {}) {
  std::mt19937_64 rng(seed);
  std::vector<BoundaryPoint> out;
  const double rd = r.to_double();
  auto rand_letter = [&] { return kLetters[static_cast<std::size_t>(rng() % 4)]; };
  for (std::size_t attempt = 0; out.size() < count && attempt < 50 * count + 50; ++attempt) {
    Rational slope;
    Word stem;
    if (alpha.is_pole()) {
      slope = Rational(static_cast<std::int64_t>(alpha.pole_sign()) * (4 * static_cast<std::int64_t>(std::ceil(rd)) +
                                                                       static_cast<std::int64_t>(rng() % 8)));
      stem = Word();
    } else {
      const auto& d = alpha.dir();
      const double v = d.slope.to_double();
      const auto depth = static_cast<std::size_t>(std::ceil(rd / std::sqrt(1 + v * v))) + 2 + rng() % 3;
      stem = d.end.expand(depth);
      slope = d.slope;
    }
    // Diverge from alpha's end right after the stem, then repeat a short
    // random cyclically reduced period.
    Letter next = rand_letter();
    if (!stem.empty() && next == inverse(stem.back())) continue;
    if (!alpha.is_pole() && next == alpha.dir().end.letter_at(stem.size())) continue;
    Word period;
    const std::size_t plen = 1 + rng() % 3;
    while (period.size() < plen) {
      Letter l = rand_letter();
      if (!period.empty() && l == inverse(period.back())) continue;
      if (period.empty() && l == inverse(next)) continue;
      period.push(l);
    }
    if (!is_cyclically_reduced(period)) continue;
    Word prefix = stem;
    prefix.push(next);
    if (prefix.size() <= stem.size()) continue;
    BoundaryPoint beta = BoundaryPoint::directional(TreeEnd(prefix, period), slope);
    if (beta == alpha) continue;
    if (std::find(out.begin(), out.end(), beta) != out.end()) continue;
    if (in_U(alpha, NeighborhoodParams(rd, 1.0), beta, base)) out.push_back(beta);
  }
  return out;
}

inline ContinuityReport continuity_probe(const BoundaryPoint& alpha, const ActionSpec& specX, const ActionSpec& specY,
                                         const ConstantsLedger& ledger, const Rational& r_bar,
                                         const std::vector<BoundaryPoint>& betas, const Bases& bases = {},
                                         std::optional<Rational> c_bar_override = std::nullopt,
                                         const PhibarOptions& opts = {}) {
  ContinuityReport rep{alpha, alpha, r_bar, ledger.continuity_r(r_bar), c_bar_override.value_or(ledger.c_bar), {}, true};
  rep.alpha_bar = phibar(alpha, specX, specY, ledger.N, bases, opts, ledger).output;
  const double rb = r_bar.to_double();
  const NeighborhoodParams in_x(rep.r.to_double(), 1.0);
  const NeighborhoodParams out_y(rb, rep.c_bar.to_double());
  const auto anchor = ray_eval(GeodesicRay{bases.y, rep.alpha_bar}, rb);
  for (const auto& beta : betas) {
    ContinuitySample s{beta, beta, in_U(alpha, in_x, beta, bases.x), 0, false};
    s.beta_bar = phibar(beta, specX, specY, ledger.N, bases, opts, ledger).output;
    s.distance = std::sqrt(image_dist_sq(anchor, bases.y, s.beta_bar));
    s.image_in_U_prime = in_U_prime(rep.alpha_bar, out_y, s.beta_bar, bases.y);
    // Only members of U(alpha; r, 1) are covered by the continuity claim.
    if (s.beta_in_U && !s.image_in_U_prime) rep.holds = false;
    rep.samples.push_back(std::move(s));
  }
  return rep;
}

struct EquivarianceCheck {
  BoundaryPoint lhs;  ///< phibar(g alpha)
  BoundaryPoint rhs;  ///< g phibar(alpha)
  bool holds;
};

inline EquivarianceCheck equivariance_check(const GroupElement& g, const BoundaryPoint& alpha, const ActionSpec& specX,
                                            const ActionSpec& specY, const Rational& N, const Bases& bases = {},
                                            const PhibarOptions& opts = {},
                                            const std::optional<ConstantsLedger>& ledger = std::nullopt) {
  auto lhs = phibar(act_boundary(specX, g, alpha), specX, specY, N, bases, opts, ledger).output;
  auto rhs = act_boundary(specY, g, phibar(alpha, specX, specY, N, bases, opts, ledger).output);
  const bool holds = lhs == rhs;
  return {std::move(lhs), std::move(rhs), holds};
}

struct SurjectivitySample {
  BoundaryPoint target;
  std::optional<BoundaryPoint> preimage;
  std::optional<BoundaryPoint> image_of_preimage;
  bool hit = false;
  std::string note;
};

/// For each target in the Y boundary: approximate it by an orbit (radius N_y,
/// at least Y's covering radius), read the X-side limit of the same group
/// elements, and map it back through phibar.
inline std::vector<SurjectivitySample> surjectivity_probe(const ActionSpec& specX, const ActionSpec& specY,
                                                          const Rational& N, const Rational& N_y,
                                                          const std::vector<BoundaryPoint>& targets,
                                                          const Bases& bases = {}, const PhibarOptions& opts = {},
                                                          const std::optional<ConstantsLedger>& ledger = std::nullopt) {
  std::vector<SurjectivitySample> out;
  for (const auto& t : targets) {
    SurjectivitySample s{t, std::nullopt, std::nullopt, false, {}};
    try {
      Bases swapped{bases.y, bases.x};
      s.preimage = sequence_and_limit(t, specY, N_y, specX, swapped, bases.x, 2 * opts.k, true, {}).second.point;
      s.image_of_preimage = phibar(*s.preimage, specX, specY, N, bases, opts, ledger).output;
      s.hit = *s.image_of_preimage == t;
    } catch (const NotConvergent& e) {
      s.note = std::string("X-side direction did not settle: ") + e.what();
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct InjectivityCheck {
  BoundaryPoint image;
  BoundaryPoint image_prime;
  bool distinct;
  double t;         ///< d_X(xi_alpha(k), Image xi_alpha')
  double bound;     ///< separation lower bound evaluated at t
  double observed;  ///< d_Y(xi_alpha_bar(R0), Image xi_alpha'_bar), R0 from g_k y0
  bool bound_respected;
};

inline InjectivityCheck injectivity_probe(const BoundaryPoint& alpha, const BoundaryPoint& alpha_prime,
                                          const ActionSpec& specX, const ActionSpec& specY,
                                          const ConstantsLedger& ledger, const Bases& bases = {},
                                          const PhibarOptions& opts = {}) {
  if (alpha == alpha_prime) throw std::invalid_argument("injectivity_probe needs distinct boundary points");
  auto res = phibar(alpha, specX, specY, ledger.N, bases, opts, ledger);
  auto res_p = phibar(alpha_prime, specX, specY, ledger.N, bases, opts, ledger);
  InjectivityCheck c{res.output, res_p.output, !(res.output == res_p.output), 0, 0, 0, true};
  const auto k = static_cast<double>(res.sequence.size());
  const auto x_point = ray_eval(GeodesicRay{bases.x, alpha}, k);
  c.t = std::sqrt(image_dist_sq(x_point, bases.x, alpha_prime));
  const double lam = ledger.lambda.to_double(), C = ledger.C.to_double(), N = ledger.N.to_double();
  const double mt = ledger.M_tilde.to_double();
  c.bound = (c.t - 2 * N) / lam - C - (4 * (mt + 1) + lam * (2 * N + 1) + C);
  const SpacePoint gk = act(specY, res.sequence.back(), bases.y);
  const auto proj = dist_point_to_ray(to_float(gk), to_float(bases.y), res.output);
  SpacePointF on_ray;
  if (res.output.is_pole()) {
    on_ray = ray_eval(GeodesicRay{bases.y, res.output}, proj.param);
  } else {
    const double v = res.output.dir().slope.to_double();
    on_ray = ray_eval(GeodesicRay{bases.y, res.output}, proj.param * std::sqrt(1 + v * v));
  }
  c.observed = std::sqrt(image_dist_sq(on_ray, bases.y, res_p.output));
  c.bound_respected = c.observed + kMetricTol >= c.bound;
  return c;
}

}  // namespace cat0bd
