// rw: command-line entry point of the Ricci soliton workbench.
// Exit codes: 0 all requested checks pass, 1 a check failed, 2 usage or
// configuration error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rw/catalog.hpp"
#include "rw/eigen_analysis.hpp"
#include "rw/errors.hpp"
#include "rw/geodesic.hpp"
#include "rw/identities.hpp"
#include "rw/kernels/kernels.hpp"
#include "rw/parallel.hpp"
#include "rw/perelman.hpp"
#include "rw/sampling.hpp"

using nlohmann::json;

namespace {

constexpr const char* kSchema = "rw.report/1";

// Argument combinations CLI11 cannot express; reported with the synopsis.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// NaN and infinities have no JSON literal; they become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json num_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json envelope(const std::string& command, bool pass, json results) {
  json j;
  j["schema"] = kSchema;
  j["command"] = command;
  j["pass"] = pass;
  j["metadata"] = {{"kernel", rw::kernels::active().name}};
  j["results"] = std::move(results);
  return j;
}

void write_json(const std::string& path, const json& j) {
  if (path.empty()) return;
  const std::string text = j.dump(2) + "\n";
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw rw::Error("cannot open " + path + " for writing");
  out << text;
}

std::string fmt(double v, int prec = 6) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

int exit_code(bool pass) { return pass ? 0 : 1; }

// ---- catalog -------------------------------------------------------------

struct CatalogOpts {
  std::string json;
};

int run_catalog(const CatalogOpts& o) {
  json list = json::array();
  for (const auto& name : rw::catalog_names()) {
    const rw::SolitonInstance s = rw::catalog_get(name);
    std::printf("%-16s n=%d  %-11s mu=%-6s %-8s %s%s\n", name.c_str(), s.dim(), rw::to_string(s.cls),
                fmt(s.mu).c_str(), s.is_gradient() ? "gradient" : "1-form", s.trivial ? "trivial" : "nontrivial",
                s.expected_soliton ? "" : "  (non-example)");
    list.push_back({{"name", name},
                    {"dim", s.dim()},
                    {"class", rw::to_string(s.cls)},
                    {"mu", s.mu},
                    {"gradient", s.is_gradient()},
                    {"trivial", s.trivial},
                    {"expected_soliton", s.expected_soliton},
                    {"coords", s.metric->coords()}});
  }
  for (const auto& name : rw::metric_only_names()) {
    std::printf("%-16s metric only\n", name.c_str());
    list.push_back({{"name", name}, {"metric_only", true}});
  }
  write_json(o.json, envelope("catalog list", true, list));
  return 0;
}

// ---- verify --------------------------------------------------------------

struct VerifyOpts {
  std::string instance, metric_file, json;
  std::vector<std::string> identities, tol_for;
  int samples = 200;
  std::uint64_t seed = 1;
  int threads = rw::default_threads();
  std::optional<double> tol;
  bool fd = false;
};

int run_verify(const VerifyOpts& o) {
  if (o.instance.empty() == o.metric_file.empty())
    throw UsageError("give exactly one of an instance name or --metric-file");
  const rw::SolitonInstance s =
      o.metric_file.empty() ? rw::catalog_get(o.instance) : rw::load_instance_file(o.metric_file);
  rw::SuiteConfig cfg;
  cfg.samples = o.samples;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.mode = o.fd ? rw::DiffMode::FiniteDifference : rw::DiffMode::Jet;
  cfg.tolerance = o.tol;
  for (const auto& entry : o.tol_for) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw rw::Error("--tol-for expects ID=VALUE, got " + entry);
    cfg.per_identity_tol[rw::parse_identity(entry.substr(0, eq))] = std::stod(entry.substr(eq + 1));
  }
  std::vector<rw::IdentityReport> reports;
  if (o.identities.empty()) {
    reports = rw::run_suite(s, cfg);
  } else {
    for (const auto& tag : o.identities) {
      cfg.only = rw::parse_identity(tag);
      if (!rw::admissible(*cfg.only, s))
        throw rw::DimensionMismatch(tag + " is not admissible for " + s.name);
      auto r = rw::run_suite(s, cfg);
      reports.insert(reports.end(), r.begin(), r.end());
    }
  }
  bool pass = true;
  json arr = json::array();
  std::printf("%s (n=%d, mu=%s, %s, %d samples, seed %llu)\n", s.name.c_str(), s.dim(), fmt(s.mu).c_str(),
              rw::to_string(cfg.mode), cfg.samples, static_cast<unsigned long long>(cfg.seed));
  for (const auto& r : reports) {
    pass = pass && r.pass;
    std::printf("  %-4s %-4s max=%-12s mean=%-12s tol=%-8s %s%s\n", rw::to_string(r.identity).c_str(),
                r.pass ? "PASS" : "FAIL", fmt(r.max_residual, 4).c_str(), fmt(r.mean_residual, 4).c_str(),
                fmt(r.tolerance, 2).c_str(), rw::describe(r.identity),
                r.error ? (" [error: " + *r.error + "]").c_str() : "");
    json j{{"identity", rw::to_string(r.identity)},
           {"description", rw::describe(r.identity)},
           {"samples", r.samples},
           {"max_residual", num(r.max_residual)},
           {"mean_residual", num(r.mean_residual)},
           {"worst_point", num_array(r.worst_point)},
           {"tolerance", r.tolerance},
           {"pass", r.pass}};
    if (r.value_mean && r.value_std)
      std::printf("       value mean=%s std=%s\n", fmt(*r.value_mean, 12).c_str(), fmt(*r.value_std, 4).c_str());
    if (r.value_mean) j["value_mean"] = num(*r.value_mean);
    if (r.value_std) j["value_std"] = num(*r.value_std);
    if (r.error) j["error"] = *r.error;
    arr.push_back(std::move(j));
  }
  std::printf("%zu reports, %s\n", reports.size(), pass ? "all pass" : "FAILURES");
  write_json(o.json, envelope("verify", pass,
                              {{"instance", s.name},
                               {"dim", s.dim()},
                               {"mu", s.mu},
                               {"mode", rw::to_string(cfg.mode)},
                               {"samples", cfg.samples},
                               {"seed", cfg.seed},
                               {"reports", arr}}));
  return exit_code(pass);
}

// ---- minimize-w ------------------------------------------------------------

struct MinimizeOpts {
  int n = 2, m = 64, max_iter = 20000;
  std::vector<double> side{2 * std::numbers::pi};
  double mu = 1.0, tol = 1e-10;
  std::string R = "0", init = "random", json, dump_csv;
  std::uint64_t seed = 1;
};

int run_minimize(const MinimizeOpts& o) {
  std::vector<double> sides = o.side;
  if (sides.size() == 1) sides.assign(o.n, sides[0]);
  const rw::PeriodicGrid g(o.n, o.m, sides);
  static const std::vector<std::string> names{"x", "y", "z", "w"};
  const rw::Expr rexpr = rw::parse_expr(o.R, std::span(names.data(), o.n));
  const rw::DiscreteField R = rw::sample_field(g, rexpr);
  rw::MinimizeConfig cfg;
  cfg.max_iter = o.max_iter;
  cfg.tolerance = o.tol;
  cfg.seed = o.seed;
  if (o.init == "random") cfg.init = rw::InitKind::Random;
  else if (o.init == "constant") cfg.init = rw::InitKind::Constant;
  else throw rw::Error("--init must be constant or random");
  const rw::MinimizeResult r = rw::minimize(g, o.mu, R, cfg);
  json rec = nullptr;
  bool pass = r.converged && r.u_min > 0 && r.monotone && r.jensen_holds && r.lower_bound_holds;
  std::printf("grid n=%d m=%d volume=%s mu=%s R=%s\n", o.n, o.m, fmt(g.volume(), 10).c_str(),
              fmt(o.mu).c_str(), o.R.c_str());
  std::printf("sigma        %s\n", fmt(r.sigma, 13).c_str());
  std::printf("C            %s\n", fmt(r.el_constant, 13).c_str());
  std::printf("el_residual  %s\n", fmt(r.el_residual, 4).c_str());
  std::printf("iterations   %d (%s)\n", r.iterations, r.converged ? "converged" : "not converged");
  std::printf("u range      [%s, %s]\n", fmt(r.u_min, 10).c_str(), fmt(r.u_max, 10).c_str());
  std::printf("invariants   monotone=%d jensen=%d lower_bound=%d (bound %s)\n", r.monotone, r.jensen_holds,
              r.lower_bound_holds, fmt(r.lower_bound, 8).c_str());
  if (r.u_min > 0) {
    const rw::RecoveredExpression e = rw::recover_f_check(g, r, o.mu, R);
    const double gap = std::abs(e.expr_mean - e.minus_4c);
    pass = pass && gap <= 1e-6 && e.expr_std <= 1e-5 * std::abs(e.expr_mean) + 1e-6;
    std::printf("E mean       %s  std %s  -4C %s  |diff| %s\n", fmt(e.expr_mean, 13).c_str(),
                fmt(e.expr_std, 4).c_str(), fmt(e.minus_4c, 13).c_str(), fmt(gap, 4).c_str());
    rec = {{"expr_mean", num(e.expr_mean)}, {"expr_std", num(e.expr_std)}, {"minus_4c", num(e.minus_4c)}};
  }
  if (!o.dump_csv.empty()) {
    std::ofstream out(o.dump_csv);
    if (!out) throw rw::Error("cannot open " + o.dump_csv + " for writing");
    out.precision(17);
    for (int a = 0; a < o.n; ++a) out << names[a] << ',';
    out << "u\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (int a = 0; a < o.n; ++a) out << g.coordinate(i, a) << ',';
      out << r.u[i] << '\n';
    }
  }
  write_json(o.json, envelope("minimize-w", pass,
                              {{"n", o.n},
                               {"m", o.m},
                               {"sides", sides},
                               {"mu", o.mu},
                               {"R", o.R},
                               {"init", o.init},
                               {"seed", o.seed},
                               {"sigma", num(r.sigma)},
                               {"el_constant", num(r.el_constant)},
                               {"el_residual", num(r.el_residual)},
                               {"iterations", r.iterations},
                               {"converged", r.converged},
                               {"u_min", num(r.u_min)},
                               {"u_max", num(r.u_max)},
                               {"monotone", r.monotone},
                               {"jensen_holds", r.jensen_holds},
                               {"lower_bound", num(r.lower_bound)},
                               {"lower_bound_holds", r.lower_bound_holds},
                               {"recovered", rec}}));
  return exit_code(pass);
}

// ---- geodesic-lab ------------------------------------------------------------

struct GeodesicOpts {
  std::string metric, report, json;
  std::vector<double> point, direction, radii{0.05, 0.1, 0.2, 0.4};
  std::optional<double> length, c_f;
  int resolution = 16;
  int threads = rw::default_threads();
};

int run_geodesic(const GeodesicOpts& o) {
  const auto m = rw::metric_get(o.metric);
  const int n = m->dim();
  std::vector<double> p = o.point;
  if (p.empty()) {
    const rw::Box& b = m->sample_box();
    for (int i = 0; i < n; ++i) p.push_back(0.5 * (b.lo[i] + b.hi[i]));
  }
  if (static_cast<int>(p.size()) != n) throw rw::DimensionMismatch("--point needs one value per coordinate");
  rw::GeodesicConfig cfg;
  cfg.threads = o.threads;
  json res{{"metric", o.metric}, {"report", o.report}, {"point", num_array(p)}};
  bool pass = true;

  if (o.report == "geodiff") {
    const auto q = rw::direction_quadrature(*m, p, o.resolution);
    const auto entries = rw::geodiff_check(*m, p, o.radii, q, cfg);
    json arr = json::array();
    std::printf("%-8s %-14s %-14s %-14s\n", "r", "max|dlog(J/S)|", "fd", "dlogS");
    for (const auto& e : entries) {
      std::printf("%-8s %-14s %-14s %-14s\n", fmt(e.r).c_str(), fmt(e.max_abs, 4).c_str(),
                  fmt(e.max_abs_fd, 4).c_str(), fmt(e.dlogS, 8).c_str());
      arr.push_back({{"r", e.r}, {"max_abs", num(e.max_abs)}, {"max_abs_fd", num(e.max_abs_fd)},
                     {"dlogS", num(e.dlogS)}});
    }
    // The quantity is o(1): small at the smallest radius, not growing toward it.
    if (!entries.empty())
      pass = entries.front().max_abs <= 0.05 && entries.front().max_abs <= entries.back().max_abs + 1e-6;
    res["directions"] = q.directions.size();
    res["entries"] = arr;
  } else if (o.report == "indexform") {
    std::vector<double> dir = o.direction;
    if (dir.empty()) {
      dir.assign(n, 0.0);
      dir[n - 1] = 1.0;
    }
    double L = 1.0;
    if (o.length) L = *o.length;
    else if (auto names = rw::catalog_names(); std::find(names.begin(), names.end(), o.metric) != names.end()) {
      const auto s = rw::catalog_get(o.metric);
      if (s.mu > 0 && s.trivial) L = rw::diameter_bound(s, 0.0);
    }
    json arr = json::array();
    const double flat = std::numbers::pi * std::numbers::pi / (2 * L);
    std::printf("index form along L=%s, h = sin(pi t/L); flat value %s\n", fmt(L, 10).c_str(), fmt(flat, 10).c_str());
    for (int fi = 0; fi < n - 1; ++fi) {
      const double I = rw::index_form(*m, p, dir, L, rw::sine_profile(L), fi, 16, cfg);
      std::printf("  E_%d  I = %s\n", fi, fmt(I, 10).c_str());
      pass = pass && I >= -1e-6;
      arr.push_back({{"frame", fi}, {"value", num(I)}});
    }
    res["direction"] = num_array(dir);
    res["length"] = L;
    res["flat_value"] = flat;
    res["values"] = arr;
  } else if (o.report == "diameter") {
    const rw::SolitonInstance s = rw::catalog_get(o.metric);
    double c = 0.0;
    if (o.c_f) c = *o.c_f;
    else c = rw::potential_sup(s, rw::sample_points(s.metric->sample_box(), 2000, 1));
    const double L = rw::diameter_bound(s, c);
    std::printf("L_max = %s  (n=%d, mu=%s, C_f=%s%s)\n", fmt(L, 17).c_str(), n, fmt(s.mu).c_str(),
                fmt(c, 10).c_str(), o.c_f ? "" : ", sampled max |f| over the chart's sample box");
    res["c_f"] = c;
    res["c_f_sampled"] = !o.c_f.has_value();
    res["mu"] = s.mu;
    res["L_max"] = L;
  } else {
    throw rw::Error("--report must be geodiff, indexform or diameter");
  }
  write_json(o.json, envelope("geodesic-lab", pass, res));
  return exit_code(pass);
}

// ---- eigen -------------------------------------------------------------------

struct EigenOpts {
  std::string instance = "cigar", json;
  int samples = 200;
  std::uint64_t seed = 1;
  int threads = rw::default_threads();
};

int run_eigen(const EigenOpts& o) {
  const rw::SolitonInstance s = rw::catalog_get(o.instance);
  const auto pts = rw::sample_points(s.metric->sample_box(), o.samples, o.seed);
  std::vector<rw::EigenEntry> entries(pts.size());
  rw::parallel_for(pts.size(), o.threads, [&](std::size_t i) { entries[i] = rw::ricci_eigen(s, pts[i]); });
  const rw::TrivialityResult t = rw::triviality_check(s, pts, 1e-8, o.threads);
  double max_trace = 0, min_lambda = INFINITY, max_lambda = -INFINITY;
  int counts[3] = {0, 0, 0};
  json arr = json::array();
  for (const auto& e : entries) {
    max_trace = std::max(max_trace, e.trace_error);
    min_lambda = std::min(min_lambda, e.eigenvalues.front());
    max_lambda = std::max(max_lambda, e.eigenvalues.back());
    ++counts[static_cast<int>(e.dichotomy)];
    arr.push_back({{"point", num_array(e.point)},
                   {"eigenvalues", num_array(e.eigenvalues)},
                   {"scalar", num(e.scalar)},
                   {"ratio", num(e.ratio)},
                   {"trace_error", num(e.trace_error)},
                   {"dichotomy", rw::to_string(e.dichotomy)}});
  }
  const bool pass = max_trace <= 1e-8;
  std::printf("%s: %d points, eigenvalues in [%s, %s], max |sum - R| = %s\n", s.name.c_str(), o.samples,
              fmt(min_lambda, 8).c_str(), fmt(max_lambda, 8).c_str(), fmt(max_trace, 3).c_str());
  std::printf("dichotomy: min-zero-others-equal %d, all-equal %d, neither %d\n", counts[0], counts[1], counts[2]);
  std::printf("einstein=%s max_tracefree=%s%s\n", t.einstein ? "true" : "false", fmt(t.max_tracefree, 3).c_str(),
              t.n2_fallback ? (" (n=2: R spread " + fmt(t.scalar_spread, 4) + ")").c_str() : "");
  write_json(o.json, envelope("eigen", pass,
                              {{"instance", s.name},
                               {"samples", o.samples},
                               {"seed", o.seed},
                               {"max_trace_error", num(max_trace)},
                               {"triviality",
                                {{"einstein", t.einstein},
                                 {"max_tracefree", num(t.max_tracefree)},
                                 {"n2_fallback", t.n2_fallback},
                                 {"scalar_spread", num(t.scalar_spread)}}},
                               {"entries", arr}}));
  return exit_code(pass);
}

// ---- equ9-fuzz -----------------------------------------------------------------

int run_fuzz(int count, std::uint64_t seed, const std::string& path) {
  const rw::EigenPolyFuzz f = rw::eigen_poly_fuzz(count, seed);
  std::printf("%d tuples (kernel %s): max relative deviation %s\n", f.count, f.kernel.c_str(),
              fmt(f.max_rel_deviation, 4).c_str());
  std::printf("nonnegative tuples %d: max factored value %s, violations %d\n", f.nonneg_tuples,
              fmt(f.max_factored_nonneg, 4).c_str(), f.sign_violations);
  write_json(path, envelope("equ9-fuzz", f.pass(),
                            {{"count", f.count},
                             {"seed", seed},
                             {"max_rel_deviation", num(f.max_rel_deviation)},
                             {"nonneg_tuples", f.nonneg_tuples},
                             {"max_factored_nonneg", num(f.max_factored_nonneg)},
                             {"sign_violations", f.sign_violations},
                             {"kernel", f.kernel}}));
  return exit_code(f.pass());
}

// ---- ode-demo --------------------------------------------------------------------

int run_ode_demo(double epsilon, const std::string& path) {
  const rw::OdeDemo d = rw::ode_counterexample_demo(epsilon);
  std::printf("f'' = 12 sqrt(f): zero start vs perturbed start f(eps)=eps^4, eps=%s\n", fmt(epsilon).c_str());
  std::printf("%-6s %-14s %-14s %-14s\n", "x", "x^4", "zero branch", "perturbed");
  json table = json::array();
  for (const auto& r : d.table) {
    std::printf("%-6s %-14s %-14s %-14s\n", fmt(r.x, 3).c_str(), fmt(r.exact_quartic, 8).c_str(),
                fmt(r.zero_branch, 8).c_str(), fmt(r.perturbed_branch, 8).c_str());
    table.push_back({{"x", r.x}, {"x4", r.exact_quartic}, {"zero", r.zero_branch}, {"perturbed", num(r.perturbed_branch)}});
  }
  std::printf("comparison hbar' = phi(hbar) + hbar at t = 1\n%-8s %-14s %-14s\n", "hbar(0)", "phi = t", "phi = 12 sqrt t");
  json hb = json::array();
  for (const auto& r : d.hbar) {
    std::printf("%-8s %-14s %-14s\n", fmt(r.start, 2).c_str(), fmt(r.lipschitz, 6).c_str(), fmt(r.sqrt_case, 6).c_str());
    hb.push_back({{"start", r.start}, {"lipschitz", r.lipschitz}, {"sqrt", r.sqrt_case}});
  }
  const rw::OsgoodVerdict lin = rw::osgood_certify({"Kt", [](double t) { return t; }, 1.0});
  const rw::OsgoodVerdict sq = rw::osgood_certify({"12sqrt(t)", [](double t) { return 12 * std::sqrt(t); }, 1.0});
  std::printf("Osgood: phi = t -> %s (%s), phi = 12 sqrt t -> %s (tail growth %s)\n", lin.osgood ? "certified" : "not certified",
              lin.tier.c_str(), sq.osgood ? "certified" : "not certified", fmt(sq.tail_growth, 3).c_str());
  const bool pass = d.zero_f1 == 0.0 && std::abs(d.perturbed_f1 - 1.0) <= 1e-4 && lin.osgood && !sq.osgood;
  write_json(path, envelope("ode-demo", pass,
                            {{"epsilon", epsilon},
                             {"zero_f1", d.zero_f1},
                             {"perturbed_f1", d.perturbed_f1},
                             {"table", table},
                             {"hbar", hb},
                             {"osgood", {{"linear", lin.osgood}, {"sqrt", sq.osgood}}}}));
  return exit_code(pass);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rw: numerical workbench for Ricci solitons"};
  app.require_subcommand(1);

  CatalogOpts cat;
  auto* c = app.add_subcommand("catalog", "Browse the soliton catalog");
  auto* cl = c->add_subcommand("list", "List registered instances and metrics");
  c->require_subcommand(1);
  cl->add_option("--json", cat.json, "Write a JSON report (- for stdout)");

  VerifyOpts ver;
  auto* v = app.add_subcommand("verify", "Run the identity suite on an instance");
  v->add_option("instance", ver.instance, "Catalog instance name");
  v->add_option("--metric-file", ver.metric_file, "Load the instance from an expression file");
  v->add_option("--identity", ver.identities, "Only these identities (I1..I14), repeatable");
  v->add_option("--samples", ver.samples, "Quasi-random sample points")->check(CLI::PositiveNumber);
  v->add_option("--seed", ver.seed, "Sample seed");
  v->add_option("--tol", ver.tol, "Tolerance for every identity")->check(CLI::PositiveNumber);
  v->add_option("--tol-for", ver.tol_for, "Per-identity tolerance ID=VALUE, repeatable");
  v->add_option("--threads", ver.threads, "Worker threads")->check(CLI::PositiveNumber);
  v->add_flag("--fd", ver.fd, "Finite-difference mode for 3rd and 4th metric derivatives");
  v->add_option("--json", ver.json, "Write a JSON report (- for stdout)");

  MinimizeOpts mo;
  auto* mw = app.add_subcommand("minimize-w", "Minimize the entropy functional on a flat torus");
  mw->add_option("--n", mo.n, "Dimension")->check(CLI::Range(1, 4));
  mw->add_option("--side", mo.side, "Side length (one, or one per axis)");
  mw->add_option("--m", mo.m, "Points per axis (even, >= 8)");
  mw->add_option("--mu", mo.mu, "mu > 0");
  mw->add_option("--R", mo.R, "Scalar curvature field in x, y, z, w");
  mw->add_option("--init", mo.init, "constant or random")->check(CLI::IsMember({"constant", "random"}));
  mw->add_option("--seed", mo.seed, "Seed of the random start");
  mw->add_option("--max-iter", mo.max_iter, "Iteration budget")->check(CLI::PositiveNumber);
  mw->add_option("--tol", mo.tol, "Euler-Lagrange residual tolerance")->check(CLI::PositiveNumber);
  mw->add_option("--json", mo.json, "Write a JSON report (- for stdout)");
  mw->add_option("--dump-csv", mo.dump_csv, "Write the minimizer as CSV");

  GeodesicOpts go;
  auto* gl = app.add_subcommand("geodesic-lab", "Geodesic sphere, index form and diameter reports");
  gl->add_option("--metric", go.metric, "Catalog instance or metric name")->required();
  gl->add_option("--report", go.report, "geodiff, indexform or diameter")
      ->required()
      ->check(CLI::IsMember({"geodiff", "indexform", "diameter"}));
  gl->add_option("--point", go.point, "Base point (defaults to the sample-box center)")->delimiter(',');
  gl->add_option("--direction", go.direction, "Geodesic direction for indexform")->delimiter(',');
  gl->add_option("--radii", go.radii, "Radii for geodiff")->delimiter(',');
  gl->add_option("--length", go.length, "Geodesic length for indexform");
  gl->add_option("--c-f", go.c_f, "Bound C_f >= max |f| for diameter");
  gl->add_option("--resolution", go.resolution, "Direction quadrature resolution")->check(CLI::Range(2, 64));
  gl->add_option("--threads", go.threads, "Worker threads")->check(CLI::PositiveNumber);
  gl->add_option("--json", go.json, "Write a JSON report (- for stdout)");

  EigenOpts eo;
  auto* ei = app.add_subcommand("eigen", "Ricci eigenvalue analysis over samples");
  ei->add_option("--instance", eo.instance, "Catalog instance name");
  ei->add_option("--samples", eo.samples, "Sample points")->check(CLI::PositiveNumber);
  ei->add_option("--seed", eo.seed, "Sample seed");
  ei->add_option("--threads", eo.threads, "Worker threads")->check(CLI::PositiveNumber);
  ei->add_option("--json", eo.json, "Write a JSON report (- for stdout)");

  int fuzz_count = 10000;
  std::uint64_t fuzz_seed = 7;
  std::string fuzz_json;
  auto* fz = app.add_subcommand("equ9-fuzz", "Fuzz the eigenvalue polynomial factorization");
  fz->add_option("--count", fuzz_count, "Tuples per family")->check(CLI::PositiveNumber);
  fz->add_option("--seed", fuzz_seed, "Seed");
  fz->add_option("--json", fuzz_json, "Write a JSON report (- for stdout)");

  double demo_eps = 1e-3;
  std::string demo_json;
  auto* od = app.add_subcommand("ode-demo", "Non-uniqueness of f'' = 12 sqrt(f) and Osgood checks");
  od->add_option("--epsilon", demo_eps, "Start of the perturbed branch");
  od->add_option("--json", demo_json, "Write a JSON report (- for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    if (rc == 0) return 0;
    const auto chosen = app.get_subcommands();
    std::cerr << (chosen.empty() ? app.help() : chosen.front()->help());
    return 2;
  }

  try {
    if (*cl) return run_catalog(cat);
    if (*v) return run_verify(ver);
    if (*mw) return run_minimize(mo);
    if (*gl) return run_geodesic(go);
    if (*ei) return run_eigen(eo);
    if (*fz) return run_fuzz(fuzz_count, fuzz_seed, fuzz_json);
    if (*od) return run_ode_demo(demo_eps, demo_json);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "rw: %s\n", e.what());
    std::cerr << app.get_subcommands().front()->help();
    return 2;
  } catch (const rw::Error& e) {
    std::fprintf(stderr, "rw: error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rw: error: %s\n", e.what());
    return 2;
  }
  return 2;
}
