#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cat0bd/cat0bd.hpp"

using namespace cat0bd;
using report::json;
using report::num;

namespace {

struct Cli {
  report::RunConfig cfg;
  std::string config_path;
  std::string spec_x, spec_y, N, M, c_bar, r_bar, expect;
  std::optional<std::int64_t> L, k, i_max;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::size_t> count;
  std::vector<std::string> alpha;
  std::vector<std::string> kinds;
  std::string suite = "near_identity";
  std::string output;
  bool csv = false;
  bool timing = false;
  bool verify_star = false;
  std::size_t witness_limit = 20;
};

/// Config file first, then command-line flags on top.
report::RunConfig build_config(const Cli& c) {
  report::RunConfig cfg = c.config_path.empty() ? report::RunConfig{} : report::load_run_config(c.config_path);
  auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) report::set_option(cfg, key, v);
  };
  set("spec_x", c.spec_x);
  set("spec_y", c.spec_y);
  set("N", c.N);
  set("M", c.M);
  set("c_bar", c.c_bar);
  set("r_bar", c.r_bar);
  set("expect", c.expect);
  if (c.L) cfg.L = *c.L;
  if (c.k) cfg.k = *c.k;
  if (c.i_max) cfg.i_max = *c.i_max;
  if (c.seed) cfg.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  if (c.count) cfg.count = *c.count;
  if (!c.alpha.empty()) cfg.alpha = c.alpha;
  if (!c.kinds.empty() && !(c.kinds.size() == 1 && c.kinds[0] == "all")) cfg.probes = c.kinds;
  if (!c.output.empty()) cfg.output = c.output;
  return cfg;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << text;
}

int finish(json body, bool pass, const report::RunConfig& cfg, const Cli& c,
           std::chrono::steady_clock::time_point start, const std::optional<report::Table>& table = std::nullopt) {
  if (c.timing)
    body["wall_clock_s"] = num(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  if (c.csv && table) emit(table->csv(), cfg.output);
  else emit(body.dump(2) + "\n", cfg.output);
  return pass == cfg.expect_pass ? 0 : 2;
}

int cmd_limits(const Cli& c, std::chrono::steady_clock::time_point start) {
  auto cfg = build_config(c);
  auto [body, table] = report::limits_report(load_spec(cfg.spec_x), load_spec(cfg.spec_y), cfg.i_max);
  return finish(body, true, cfg, c, start, table);
}

int cmd_check_star(const Cli& c, std::chrono::steady_clock::time_point start) {
  auto cfg = build_config(c);
  auto r = report::resolve(cfg);
  StarOptions so;
  so.threads = cfg.threads;
  StarVerdict v;
  if (cfg.M) {
    v = check_condition_star(r.x, r.y, r.N, *cfg.M, cfg.L, {}, {}, so);
  } else {
    so.collect_witnesses = false;
    const Rational m_sq = minimal_M_on_ball(r.x, r.y, r.N, cfg.L, {}, {}, so);
    v = check_condition_star(r.x, r.y, r.N, ceil_sqrt_on_grid(m_sq, Rational(1, 8)), cfg.L, {}, {}, so);
  }
  json body = report::star_report(v, c.witness_limit);
  body["spec_x"] = report::to_json(r.x);
  body["spec_y"] = report::to_json(r.y);
  return finish(body, v.holds_on_ball, cfg, c, start, report::star_table(v));
}

int cmd_phibar(const Cli& c, std::chrono::steady_clock::time_point start) {
  auto cfg = build_config(c);
  auto r = report::resolve(cfg);
  bool verified = false;
  json star = nullptr;
  if (c.verify_star) {
    const auto& led = report::ledger_of(r, cfg);
    StarOptions so;
    so.threads = cfg.threads;
    so.collect_witnesses = false;
    auto v = check_condition_star(r.x, r.y, r.N, led.M, cfg.L, {}, {}, so);
    verified = v.holds_on_ball;
    star = {{"L", cfg.L}, {"M", num(led.M)}, {"holds_on_ball", v.holds_on_ball}};
  }
  auto alphas = report::alphas_or(cfg, {BoundaryPoint::parse("[a^inf,0]")});
  json items = json::array();
  for (const auto& a : alphas)
    items.push_back(report::phibar_report(phibar(a, r.x, r.y, r.N, {}, report::phibar_options(cfg, verified))));
  json body{{"spec_x", report::to_json(r.x)}, {"spec_y", report::to_json(r.y)}, {"N", num(r.N)}, {"results", items}};
  if (!star.is_null()) body["condition_star"] = star;
  return finish(body, true, cfg, c, start);
}

int cmd_bounds(const Cli& c, std::chrono::steady_clock::time_point start) {
  auto cfg = build_config(c);
  if (c.suite == "growth") {
    auto r = report::resolve(cfg);
    report::Table t{{"i", "g", "a", "d_sq_x", "d_sq_y", "meets_x"}, {}};
    json rows = json::array();
    for (const auto& row : witness_growth_scan(r.x, r.y, r.N, canonical_family, cfg.i_max)) {
      rows.push_back({{"i", row.i},
                      {"g", row.g.to_string()},
                      {"a", row.a.to_string()},
                      {"d_sq_x", num(row.d_sq_x)},
                      {"d_sq_y", num(row.d_sq_y)},
                      {"meets_x", row.meets_x}});
      t.rows.push_back({std::to_string(row.i), row.g.to_string(), row.a.to_string(), row.d_sq_x.to_string(),
                        row.d_sq_y.to_string(), row.meets_x ? "true" : "false"});
    }
    return finish(json{{"spec_x", report::to_json(r.x)}, {"spec_y", report::to_json(r.y)}, {"rows", rows}}, true, cfg,
                  c, start, t);
  }
  if (c.suite == "near_identity") cfg.probes = {"near_identity"};
  else if (c.suite == "spread") cfg.probes = {"spread"};
  else throw std::invalid_argument("unknown suite '" + c.suite + "' (near_identity, spread, growth)");
  auto out = report::run_suite(cfg);
  return finish(out.body, out.pass, cfg, c, start);
}

int cmd_probe(const Cli& c, std::chrono::steady_clock::time_point start) {
  auto cfg = build_config(c);
  auto out = report::run_suite(cfg);
  return finish(out.body, out.pass, cfg, c, start);
}

int cmd_report(const Cli& c, std::chrono::steady_clock::time_point start) {
  auto cfg = build_config(c);
  auto suite = report::run_suite(cfg);
  auto r = report::resolve(cfg);
  json body = suite.body;
  body["limits"] = report::limits_report(r.x, r.y, cfg.i_max).first;
  body["config"] = {{"L", cfg.L}, {"L_qi", cfg.L_qi}, {"k", cfg.k}, {"count", cfg.count}, {"i_max", cfg.i_max}};
  return finish(body, suite.pass, cfg, c, start);
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app{"Boundary maps between CAT(0) actions of F2 x Z on T x R"};
  app.require_subcommand(1);
  Cli c;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config_path, "flat key=value run configuration");
    sub->add_option("--spec-x", c.spec_x, "preset (dot, star, scaled2) or action config path");
    sub->add_option("--spec-y", c.spec_y, "preset or action config path");
    sub->add_option("--L", c.L, "ball radius");
    sub->add_option("--N", c.N, "rational or auto");
    sub->add_option("--M", c.M, "rational or auto");
    sub->add_option("--k", c.k, "approximating sequence length");
    sub->add_option("--i-max", c.i_max, "rows in family tables");
    sub->add_option("--seed", c.seed, "sampling seed");
    sub->add_option("--threads", c.threads, "worker threads for ball scans");
    sub->add_option("--count", c.count, "sampled boundary points per probe");
    sub->add_option("--alpha", c.alpha, "boundary point, e.g. \"[a^inf,0/1]\" (repeatable)")
        ->allow_extra_args(false);  // keep "[..,..]" whole
    sub->add_option("--c-bar", c.c_bar, "continuity threshold override");
    sub->add_option("--r-bar", c.r_bar, "comma-separated continuity radii");
    sub->add_option("--expect", c.expect, "pass or fail; exit 0 when the verdict matches");
    sub->add_option("--output", c.output, "write to this file instead of stdout");
    sub->add_flag("--json", "JSON output (default)");
    sub->add_flag("--csv", c.csv, "CSV output for tables");
    sub->add_flag("--timing", c.timing, "add wall-clock time to the report");
  };

  auto* limits = app.add_subcommand("limits", "orbit limits of (a^i b^i, 0) and (a^i, 0)");
  auto* star = app.add_subcommand("check-star", "check condition (*) on a ball");
  auto* phib = app.add_subcommand("phibar", "boundary map of one or more points");
  auto* bounds = app.add_subcommand("bounds", "proof-bound suites");
  auto* probe = app.add_subcommand("probe", "run property probes");
  auto* rep = app.add_subcommand("report", "full report from a configuration");
  for (auto* s : {limits, star, phib, bounds, probe, rep}) common(s);
  star->add_option("--witness-limit", c.witness_limit, "witnesses listed in JSON");
  phib->add_flag("--verify-star", c.verify_star, "check (*) on ball(L) with the ledger M first");
  bounds->add_option("--suite", c.suite, "near_identity, spread or growth");
  probe->add_option("--kind", c.kinds, "phibar, well_defined, near_identity, spread, continuity, equivariance, "
                                       "injectivity, surjectivity or all")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*limits) return cmd_limits(c, start);
    if (*star) return cmd_check_star(c, start);
    if (*phib) return cmd_phibar(c, start);
    if (*bounds) return cmd_bounds(c, start);
    if (*probe) return cmd_probe(c, start);
    if (*rep) return cmd_report(c, start);
  } catch (const InvalidConstants& e) {
    std::cerr << json{{"error", "InvalidConstants"}, {"message", e.what()}, {"covering_radius", num(e.covering_radius)}}
                     .dump(2)
              << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "check failed"}, {"message", e.what()}}.dump(2) << "\n";
    return 2;
  }
  return 1;
}
