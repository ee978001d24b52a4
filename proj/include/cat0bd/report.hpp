#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cat0bd/boundary_map.hpp"
#include "cat0bd/condition_star.hpp"
#include "cat0bd/group_action.hpp"

namespace cat0bd::report {

using nlohmann::json;

inline json num(const Rational& q) { return {{"exact", true}, {"value", q.to_string()}, {"approx", q.to_double()}}; }
inline json num(double x) { return {{"exact", false}, {"value", x}}; }

inline json to_json(const BoundaryPoint& b) {
  json j{{"text", b.to_string()}, {"angle", num(b.angle())}};
  if (b.is_pole()) {
    j["pole"] = b.pole_sign() > 0 ? "+" : "-";
  } else {
    j["end"] = b.dir().end.to_string();
    j["slope"] = num(b.dir().slope);
  }
  return j;
}

inline json to_json(const ActionSpec& s) {
  return {{"name", s.name}, {"weight_a", num(s.weight_a)}, {"weight_b", num(s.weight_b)}, {"z_shift", num(s.z_shift)}};
}

inline json to_json(const ConstantsLedger& l) {
  return {{"N", num(l.N)},           {"M", num(l.M)},          {"lambda", num(l.lambda)},
          {"C", num(l.C)},           {"N_tilde", num(l.N_tilde)}, {"M_tilde", num(l.M_tilde)},
          {"M_prime", num(l.M_prime)}, {"c_bar", num(l.c_bar)}};
}

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
  std::string spec_x = "dot";
  std::string spec_y = "dot";
  std::int64_t L = 8;
  std::int64_t L_qi = 6;
  std::optional<Rational> N;  ///< absent = auto
  std::optional<Rational> M;  ///< absent = auto
  std::vector<std::string> probes;
  std::string output;
  std::uint64_t seed = 1;
  std::int64_t i_max = 10;
  std::int64_t k = 24;
  std::size_t count = 20;
  std::vector<std::string> alpha;
  std::optional<Rational> c_bar;
  std::vector<Rational> r_bar{Rational(2), Rational(4)};
  unsigned threads = 1;
  bool expect_pass = true;
};

inline std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    auto b = cur.find_first_not_of(" \t");
    auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

inline std::optional<Rational> parse_auto(const std::string& v) {
  if (v == "auto") return std::nullopt;
  return Rational::parse(v);
}

/// Applies one key=value setting.
inline void set_option(RunConfig& c, const std::string& key, const std::string& v) {
  if (key == "spec_x") c.spec_x = v;
  else if (key == "spec_y") c.spec_y = v;
  else if (key == "L") c.L = std::stoll(v);
  else if (key == "L_qi") c.L_qi = std::stoll(v);
  else if (key == "N") c.N = parse_auto(v);
  else if (key == "M") c.M = parse_auto(v);
  else if (key == "probes") c.probes = split_list(v, ',');
  else if (key == "output") c.output = v;
  else if (key == "seed") c.seed = std::stoull(v);
  else if (key == "i_max") c.i_max = std::stoll(v);
  else if (key == "k") c.k = std::stoll(v);
  else if (key == "count") c.count = std::stoull(v);
  else if (key == "alpha") c.alpha = split_list(v, ';');
  else if (key == "c_bar") c.c_bar = parse_auto(v);
  else if (key == "r_bar") {
    c.r_bar.clear();
    for (const auto& r : split_list(v, ',')) c.r_bar.push_back(Rational::parse(r));
  } else if (key == "threads") c.threads = static_cast<unsigned>(std::stoul(v));
  else if (key == "expect") {
    if (v != "pass" && v != "fail") throw std::invalid_argument("expect must be pass or fail");
    c.expect_pass = v == "pass";
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

inline RunConfig parse_run_config(std::istream& in) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": missing '='");
    auto key = split_list(line.substr(0, eq), '\n');
    auto val = split_list(line.substr(eq + 1), '\n');
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    set_option(c, key[0], val.empty() ? "" : val[0]);
  }
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  return parse_run_config(in);
}

/// Smallest multiple of 1/8 that is at least the covering radius.
inline Rational auto_N(const ActionSpec& spec, const SpacePoint& base = {}) {
  const auto cr = covering_radius(spec, base);
  const Rational step(1, 8);
  if (cr.value_sq) return ceil_sqrt_on_grid(*cr.value_sq, step);
  Rational n(static_cast<std::int64_t>(std::floor(cr.value)));
  while (n.to_double() < cr.value - detail::kScanTol) n += step;
  return n;
}

struct Resolved {
  ActionSpec x;
  ActionSpec y;
  Rational N;
  std::optional<ConstantsLedger> ledger;  ///< filled when a probe needs it
};

inline Resolved resolve(const RunConfig& c) {
  Resolved r{load_spec(c.spec_x), load_spec(c.spec_y), Rational(), std::nullopt};
  r.N = c.N ? *c.N : auto_N(r.x);
  detail::check_constants(r.x, r.y, r.N, c.M, {}, {});
  return r;
}

inline const ConstantsLedger& ledger_of(Resolved& r, const RunConfig& c) {
  if (!r.ledger) r.ledger = derive_ledger(r.x, r.y, r.N, c.M, c.L_qi, c.L, {}, c.threads);
  return *r.ledger;
}

// ---------------------------------------------------------------------------
// limits

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        const bool quote = cells[i].find_first_of(",\"") != std::string::npos;
        if (!quote) {
          os << cells[i];
          continue;
        }
        os << '"';
        for (char ch : cells[i]) os << (ch == '"' ? "\"\"" : std::string(1, ch));
        os << '"';
      }
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
  }
};

inline std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

/// Orbit limits of (a^i b^i, 0) and (a^i, 0) under both actions.
inline std::pair<json, Table> limits_report(const ActionSpec& x, const ActionSpec& y, std::int64_t i_max) {
  json rows = json::array();
  Table t{{"i", "spec", "element", "end", "slope", "angle", "prefix_len"}, {}};
  const TreeEnd a_end = TreeEnd::parse("a^inf");
  for (std::int64_t i = 1; i <= i_max; ++i) {
    const auto fam = canonical_family(i);
    for (const ActionSpec* s : {&x, &y}) {
      for (const GroupElement* g : {&fam.first, &fam.second}) {
        const BoundaryPoint lim = orbit_limit(*s, *g);
        json row{{"i", i}, {"spec", s->name}, {"element", g->to_string()}, {"limit", to_json(lim)}};
        std::string prefix_len;
        if (!lim.is_pole()) {
          auto cp = common_prefix_length(lim.dir().end, a_end);
          row["prefix_len_with_a_inf"] = cp ? json(*cp) : json("equal");
          prefix_len = cp ? std::to_string(*cp) : "equal";
        }
        rows.push_back(row);
        t.rows.push_back({std::to_string(i), s->name, g->to_string(),
                          lim.is_pole() ? "pole" : lim.dir().end.to_string(),
                          lim.is_pole() ? "" : lim.dir().slope.to_string(), fmt_double(lim.angle()), prefix_len});
      }
    }
  }
  return {json{{"spec_x", to_json(x)}, {"spec_y", to_json(y)}, {"i_max", i_max}, {"rows", rows}}, t};
}

// ---------------------------------------------------------------------------
// check-star

inline json to_json(const StarWitness& w) {
  return {{"g", w.g.to_string()}, {"a", w.a.to_string()}, {"d_sq_x", num(w.d_sq_x)}, {"d_sq_y", num(w.d_sq_y)}};
}

inline json star_report(const StarVerdict& v, std::size_t witness_limit) {
  json w = json::array();
  for (std::size_t i = 0; i < v.witnesses.size() && i < witness_limit; ++i) w.push_back(to_json(v.witnesses[i]));
  json j{{"holds_on_ball", v.holds_on_ball},
         {"L", v.L},
         {"N", num(v.N)},
         {"minimal_M_sq", num(v.minimal_M_sq)},
         {"witness_count", v.witnesses.size()},
         {"witnesses", w},
         {"group_elements", v.group_elements},
         {"candidates_tested", v.candidates_tested},
         {"qualifying_pairs", v.qualifying_pairs}};
  if (v.M) j["M"] = num(*v.M);
  if (v.maximizer) j["maximizer"] = to_json(*v.maximizer);
  return j;
}

inline Table star_table(const StarVerdict& v) {
  Table t{{"g", "a", "d_sq_x", "d_sq_y"}, {}};
  for (const auto& w : v.witnesses)
    t.rows.push_back({w.g.to_string(), w.a.to_string(), w.d_sq_x.to_string(), w.d_sq_y.to_string()});
  return t;
}

// ---------------------------------------------------------------------------
// phibar and the probe suite

inline json phibar_report(const PhibarResult& r) {
  json seq = json::array();
  for (const auto& g : r.sequence) seq.push_back(g.to_string());
  json j{{"alpha", to_json(r.input)},    {"phibar", to_json(r.output)}, {"k", r.k_used},
         {"epsilon0", num(r.epsilon0)}, {"sequence", seq},             {"unverified", r.unverified}};
  if (r.analytic_crosscheck) j["analytic"] = to_json(*r.analytic_crosscheck);
  json unresolved = json::array();
  for (double x : r.image_cauchy.unresolved_r) unresolved.push_back(x);
  j["image_cauchy"] = {{"consistent", r.image_cauchy.consistent}, {"unresolved_r", unresolved}};
  return j;
}

struct ProbeOutcome {
  json body;
  bool pass = true;
};

inline std::vector<BoundaryPoint> alphas_or(const RunConfig& c, std::vector<BoundaryPoint> fallback) {
  if (c.alpha.empty()) return fallback;
  std::vector<BoundaryPoint> out;
  for (const auto& s : c.alpha) out.push_back(BoundaryPoint::parse(s));
  return out;
}

inline PhibarOptions phibar_options(const RunConfig& c, bool star_verified = false) {
  PhibarOptions o;
  o.k = c.k;
  o.star_verified = star_verified;
  return o;
}

inline ProbeOutcome probe_phibar(Resolved& r, const RunConfig& c) {
  ProbeOutcome out;
  json items = json::array();
  const bool identity = r.x.same_action(r.y);
  for (const auto& a : alphas_or(c, sample_boundary_points(c.count, c.seed))) {
    json item{{"alpha", a.to_string()}};
    try {
      auto res = phibar(a, r.x, r.y, r.N, {}, phibar_options(c));
      item["phibar"] = res.output.to_string();
      item["analytic"] = res.analytic_crosscheck->to_string();
      item["k"] = res.k_used;
      bool ok = true;
      if (identity) ok = res.output == a;
      if (a.is_pole()) ok = ok && res.output == a;
      item["pass"] = ok;
      out.pass = out.pass && ok;
    } catch (const std::exception& e) {
      item["error"] = e.what();
      item["pass"] = false;
      out.pass = false;
    }
    items.push_back(item);
  }
  out.body = {{"identity_expected", identity}, {"items", items}};
  return out;
}

inline ProbeOutcome probe_well_defined(Resolved& r, const RunConfig& c) {
  ProbeOutcome out;
  json items = json::array();
  auto alphas = alphas_or(c, sample_boundary_points(std::max<std::size_t>(1, c.count / 2), c.seed + 11));
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    auto w = well_definedness_check(alphas[i], r.x, r.y, r.N, c.seed + i, {}, c.k);
    items.push_back({{"alpha", alphas[i].to_string()},
                     {"nearest", w.from_nearest.to_string()},
                     {"seeded", w.from_seeded.to_string()},
                     {"interleaved", w.from_interleaved.to_string()},
                     {"pass", w.holds}});
    out.pass = out.pass && w.holds;
  }
  out.body = {{"items", items}};
  return out;
}

inline ProbeOutcome probe_near_identity(Resolved& r, const RunConfig& c) {
  ProbeOutcome out;
  const auto& led = ledger_of(r, c);
  json items = json::array();
  for (const auto& a : alphas_or(c, {BoundaryPoint::parse("[(ab)^inf,1]"), BoundaryPoint::parse("[a^inf,0]")})) {
    auto res = phibar(a, r.x, r.y, r.N, {}, phibar_options(c), led);
    json bounds = json::array();
    for (const auto& b : near_identity_bounds(res, led, r.x, r.y, {}, 12)) {
      bounds.push_back({{"item", b.item},
                        {"bound", num(b.bound)},
                        {"worst_sq", num(b.worst_sq)},
                        {"margin_sq", num(b.margin_sq)},
                        {"pass", b.holds}});
      out.pass = out.pass && b.holds;
    }
    items.push_back({{"alpha", a.to_string()}, {"phibar", res.output.to_string()}, {"bounds", bounds}});
  }
  out.body = {{"ledger", to_json(led)}, {"items", items}};
  return out;
}

inline ProbeOutcome probe_spread(Resolved& r, const RunConfig& c) {
  ProbeOutcome out;
  const auto& led = ledger_of(r, c);
  json items = json::array();
  for (const auto& a : alphas_or(c, {BoundaryPoint::parse("[(ab)^inf,1]")})) {
    for (const auto& s : image_spread_check(a, r.x, r.y, led, {1, 2, 4, 8})) {
      items.push_back({{"alpha", a.to_string()},
                       {"R", s.R},
                       {"r", num(s.r)},
                       {"i0", s.i0 ? json(*s.i0) : json(nullptr)},
                       {"spread", num(s.spread)},
                       {"bound", num(led.M_prime)},
                       {"pass", s.holds}});
      out.pass = out.pass && s.holds;
    }
  }
  out.body = {{"ledger", to_json(led)}, {"items", items}};
  return out;
}

/// Ends (a^k b^k)^inf with slope 0: they converge to [a^inf, 0] as k grows.
inline std::vector<BoundaryPoint> slope_jump_family(std::int64_t k_from, std::int64_t count) {
  std::vector<BoundaryPoint> out;
  for (std::int64_t k = k_from; k < k_from + count; ++k) {
    std::string w(static_cast<std::size_t>(k), 'a');
    w += std::string(static_cast<std::size_t>(k), 'b');
    out.push_back(BoundaryPoint::directional(TreeEnd(Word(), Word(w)), Rational(0)));
  }
  return out;
}

inline ProbeOutcome probe_continuity(Resolved& r, const RunConfig& c) {
  ProbeOutcome out;
  const auto& led = ledger_of(r, c);
  json items = json::array();
  const auto a_inf = BoundaryPoint::parse("[a^inf,0]");
  for (const auto& a : alphas_or(c, {a_inf})) {
    for (const auto& rb : c.r_bar) {
      const Rational rr = led.continuity_r(rb);
      auto betas = sample_neighbors(a, rr, std::max<std::size_t>(3, c.count / 4), c.seed);
      if (a == a_inf) {
        auto fam = slope_jump_family(rr.floor() + 1, 2);
        betas.insert(betas.end(), fam.begin(), fam.end());
      }
      auto rep = continuity_probe(a, r.x, r.y, led, rb, betas, {}, c.c_bar, phibar_options(c));
      json samples = json::array();
      for (const auto& s : rep.samples)
        samples.push_back({{"beta", s.beta.to_string()},
                           {"beta_bar", s.beta_bar.to_string()},
                           {"beta_in_U", s.beta_in_U},
                           {"distance", num(s.distance)},
                           {"image_in_U_prime", s.image_in_U_prime}});
      items.push_back({{"alpha", a.to_string()},
                       {"alpha_bar", rep.alpha_bar.to_string()},
                       {"r_bar", num(rb)},
                       {"r", num(rep.r)},
                       {"c_bar", num(rep.c_bar)},
                       {"samples", samples},
                       {"pass", rep.holds}});
      out.pass = out.pass && rep.holds;
    }
  }
  out.body = {{"ledger", to_json(led)}, {"items", items}};
  return out;
}

inline GroupElement random_element(std::mt19937_64& rng, std::size_t max_len, std::int64_t max_z) {
  Word w;
  const std::size_t len = rng() % (max_len + 1);
  while (w.size() < len) {
    Letter l = kLetters[static_cast<std::size_t>(rng() % 4)];
    if (!w.empty() && l == inverse(w.back())) continue;
    w.push(l);
  }
  const auto z = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(2 * max_z + 1)) - max_z;
  return GroupElement(w, z);
}

inline ProbeOutcome probe_equivariance(Resolved& r, const RunConfig& c) {
  ProbeOutcome out;
  json items = json::array();
  std::mt19937_64 rng(c.seed);
  auto alphas = alphas_or(c, sample_boundary_points(c.count, c.seed + 23));
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const GroupElement g = random_element(rng, 4, 3);
    auto e = equivariance_check(g, alphas[i], r.x, r.y, r.N, {}, phibar_options(c));
    items.push_back({{"g", g.to_string()},
                     {"alpha", alphas[i].to_string()},
                     {"phibar_of_g_alpha", e.lhs.to_string()},
                     {"g_phibar_alpha", e.rhs.to_string()},
                     {"pass", e.holds}});
    out.pass = out.pass && e.holds;
  }
  out.body = {{"items", items}};
  return out;
}

inline ProbeOutcome probe_injectivity(Resolved& r, const RunConfig& c) {
  ProbeOutcome out;
  const auto& led = ledger_of(r, c);
  json items = json::array();
  auto pts = sample_boundary_points(2 * std::max<std::size_t>(1, c.count / 4), c.seed + 31);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    if (pts[i] == pts[i + 1]) continue;
    auto inj = injectivity_probe(pts[i], pts[i + 1], r.x, r.y, led, {}, phibar_options(c));
    const bool ok = inj.distinct && inj.bound_respected;
    items.push_back({{"alpha", pts[i].to_string()},
                     {"alpha_prime", pts[i + 1].to_string()},
                     {"images", {inj.image.to_string(), inj.image_prime.to_string()}},
                     {"t", num(inj.t)},
                     {"separation_bound", num(inj.bound)},
                     {"observed", num(inj.observed)},
                     {"pass", ok}});
    out.pass = out.pass && ok;
  }
  out.body = {{"items", items}};
  return out;
}

inline ProbeOutcome probe_surjectivity(Resolved& r, const RunConfig& c) {
  ProbeOutcome out;
  const auto& led = ledger_of(r, c);
  json items = json::array();
  for (const auto& s : surjectivity_probe(r.x, r.y, r.N, auto_N(r.y),
                                          sample_boundary_points(std::max<std::size_t>(1, c.count / 2), c.seed + 41),
                                          {}, phibar_options(c), led)) {
    json item{{"target", s.target.to_string()}, {"pass", s.hit}};
    if (s.preimage) item["preimage"] = s.preimage->to_string();
    if (s.image_of_preimage) item["image_of_preimage"] = s.image_of_preimage->to_string();
    if (!s.note.empty()) item["note"] = s.note;
    items.push_back(item);
    out.pass = out.pass && s.hit;
  }
  out.body = {{"items", items}};
  return out;
}

inline const std::vector<std::string>& all_probes() {
  static const std::vector<std::string> v{"phibar",     "well_defined", "near_identity", "spread",
                                          "continuity", "equivariance", "injectivity",   "surjectivity"};
  return v;
}

inline ProbeOutcome run_probe(const std::string& kind, Resolved& r, const RunConfig& c) {
  if (kind == "phibar") return probe_phibar(r, c);
  if (kind == "well_defined") return probe_well_defined(r, c);
  if (kind == "near_identity") return probe_near_identity(r, c);
  if (kind == "spread") return probe_spread(r, c);
  if (kind == "continuity") return probe_continuity(r, c);
  if (kind == "equivariance") return probe_equivariance(r, c);
  if (kind == "injectivity") return probe_injectivity(r, c);
  if (kind == "surjectivity") return probe_surjectivity(r, c);
  throw std::invalid_argument("unknown probe '" + kind + "'");
}

/// Runs the requested probes (all when none are listed) and aggregates.
inline ProbeOutcome run_suite(const RunConfig& c) {
  Resolved r = resolve(c);
  const auto& kinds = c.probes.empty() ? all_probes() : c.probes;
  json probes = json::object();
  bool pass = true;
  for (const auto& k : kinds) {
    auto o = run_probe(k, r, c);
    o.body["pass"] = o.pass;
    probes[k] = o.body;
    pass = pass && o.pass;
  }
  json j{{"spec_x", to_json(r.x)}, {"spec_y", to_json(r.y)}, {"N", num(r.N)}, {"seed", c.seed}, {"probes", probes},
         {"pass", pass}};
  if (r.ledger) j["ledger"] = to_json(*r.ledger);
  return {j, pass};
}

}  // namespace cat0bd::report
