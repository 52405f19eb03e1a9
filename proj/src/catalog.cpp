#include "rw/catalog.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rw/errors.hpp"

namespace rw {

const char* to_string(SolitonClass c) noexcept {
  switch (c) {
    case SolitonClass::Contracting: return "contracting";
    case SolitonClass::Steady: return "steady";
    case SolitonClass::Expanding: return "expanding";
  }
  return "?";
}

SolitonClass class_of(double mu) noexcept {
  if (mu > 0) return SolitonClass::Contracting;
  if (mu < 0) return SolitonClass::Expanding;
  return SolitonClass::Steady;
}

ExprTensor SolitonInstance::omega() const {
  if (one_form) return *one_form;
  ExprTensor w(dim(), downs(1));
  for (int i = 0; i < dim(); ++i) w(i) = potential->diff(i);
  return w;
}

void SolitonInstance::validate() const {
  if (!metric) throw Error("instance '" + name + "' has no metric");
  if (potential.has_value() == one_form.has_value())
    throw Error("instance '" + name + "' must carry exactly one of a potential or a 1-form");
  if (one_form && (one_form->dim() != dim() || one_form->valence() != downs(1)))
    throw ShapeMismatch("instance '" + name + "': 1-form must be (0,1) of the chart dimension");
  if (cls != class_of(mu))
    throw Error("instance '" + name + "': class tag does not match the sign of mu");
  if (trivial) {
    bool zero = true;
    if (potential) zero = potential->is_constant();
    if (one_form)
      for (const auto& c : one_form->data())
        zero = zero && c.op() == Expr::Op::Const && c.constant_value() == 0.0;
    if (!zero)
      throw Error("instance '" + name + "': trivial requires a constant potential or zero form");
  }
  const int top = potential ? potential->max_var() : -1;
  if (top >= dim()) throw DimensionMismatch("instance '" + name + "' uses unknown coordinates");
}

namespace {

Expr X(int i) { return Expr::var(i); }

ExprTensor diagonal(const std::vector<Expr>& d) {
  const int n = static_cast<int>(d.size());
  ExprTensor g(n, downs(2), Expr(0.0));
  for (int i = 0; i < n; ++i) g(i, i) = d[i];
  return g;
}

std::vector<std::string> flat_names(int n) {
  static const char* names[] = {"x", "y", "z", "w"};
  return {names, names + n};
}

Box cube(int n, double lo, double hi) {
  return Box{std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

std::shared_ptr<const ChartMetric> sphere_chart(int n, const std::string& name) {
  static const std::vector<std::vector<std::string>> names{
      {"theta", "phi"}, {"chi", "theta", "phi"}, {"psi", "chi", "theta", "phi"}};
  std::vector<Expr> d;
  Expr w(1.0);
  for (int i = 0; i < n; ++i) {
    d.push_back(w);
    if (i < n - 1) w = w * pow(sin(X(i)), 2);
  }
  Box dom, smp;
  for (int i = 0; i < n; ++i) {
    const bool polar = i < n - 1;
    dom.lo.push_back(polar ? 0.05 : -2 * M_PI);
    dom.hi.push_back(polar ? M_PI - 0.05 : 2 * M_PI);
    smp.lo.push_back(polar ? 0.2 : -M_PI);
    smp.hi.push_back(polar ? M_PI - 0.2 : M_PI);
  }
  return std::make_shared<const ChartMetric>(name, names[n - 2], dom, diagonal(d), smp);
}

std::shared_ptr<const ChartMetric> flat_chart(int n, const std::string& name, Box dom, Box smp) {
  std::vector<Expr> d(n, Expr(1.0));
  return std::make_shared<const ChartMetric>(name, flat_names(n), dom, diagonal(d), smp);
}

SolitonInstance finish(SolitonInstance s) {
  s.cls = class_of(s.mu);
  s.validate();
  return s;
}

SolitonInstance sphere(int n) {
  SolitonInstance s;
  s.name = "sphere_" + std::to_string(n);
  s.metric = sphere_chart(n, s.name);
  s.potential = Expr(0.0);
  s.mu = n * (n - 1.0);
  s.trivial = true;
  return finish(s);
}

SolitonInstance sphere_bad_f() {
  SolitonInstance s;
  s.name = "sphere_bad_f";
  s.metric = sphere_chart(2, s.name);
  s.potential = cos(X(0));
  s.mu = 2.0;
  s.expected_soliton = false;
  return finish(s);
}

SolitonInstance hyperbolic(int n) {
  SolitonInstance s;
  s.name = "hyperbolic_" + std::to_string(n);
  std::vector<std::string> names;
  for (int i = 0; i < n - 1; ++i) names.push_back(n == 2 ? "x" : "x" + std::to_string(i + 1));
  names.push_back("y");
  const Expr c = Expr(1.0) / pow(X(n - 1), 2);
  Box dom = cube(n, -5, 5), smp = cube(n, -2, 2);
  dom.lo[n - 1] = 0.1;
  dom.hi[n - 1] = 10;
  smp.lo[n - 1] = 0.3;
  smp.hi[n - 1] = 3;
  s.metric = std::make_shared<const ChartMetric>(s.name, names, dom,
                                                 diagonal(std::vector<Expr>(n, c)), smp);
  s.potential = Expr(0.0);
  s.mu = -n * (n - 1.0);
  s.trivial = true;
  return finish(s);
}

SolitonInstance gaussian(int n, double mu, const std::string& name) {
  SolitonInstance s;
  s.name = name;
  s.metric = flat_chart(n, name, cube(n, -5, 5), cube(n, -4.5, 4.5));
  Expr r2(0.0);
  for (int i = 0; i < n; ++i) r2 = r2 + pow(X(i), 2);
  s.potential = mu == 0.0 ? Expr(0.0) : Expr(mu / (2.0 * n)) * r2;
  s.mu = mu;
  s.trivial = mu == 0.0;
  return finish(s);
}

SolitonInstance gaussian_rot() {
  SolitonInstance s;
  s.name = "gaussian_2_rot";
  s.metric = flat_chart(2, s.name, cube(2, -5, 5), cube(2, -4.5, 4.5));
  s.mu = 1.0;
  const double c = 0.5;
  ExprTensor w(2, downs(1));
  w(0) = Expr(s.mu / 2) * X(0) - Expr(c) * X(1);
  w(1) = Expr(s.mu / 2) * X(1) + Expr(c) * X(0);
  s.one_form = w;
  return finish(s);
}

SolitonInstance cigar() {
  SolitonInstance s;
  s.name = "cigar";
  const Expr q = Expr(1.0) + pow(X(0), 2) + pow(X(1), 2);
  const Expr c = Expr(1.0) / q;
  s.metric = std::make_shared<const ChartMetric>(s.name, flat_names(2), cube(2, -5, 5),
                                                 diagonal({c, c}), cube(2, -4, 4));
  s.potential = -log(q);
  s.mu = 0.0;
  return finish(s);
}

SolitonInstance flat_torus(int n) {
  SolitonInstance s;
  s.name = "flat_torus_" + std::to_string(n);
  s.metric = flat_chart(n, s.name, cube(n, -1.0, 2 * M_PI + 1.0), cube(n, 0.0, 2 * M_PI));
  s.potential = Expr(0.0);
  s.mu = 0.0;
  s.trivial = true;
  return finish(s);
}

// Round S^2 times R^k with the Gaussian potential on the flat factor.
SolitonInstance cylinder(int n) {
  SolitonInstance s;
  s.name = "cylinder_" + std::to_string(n);
  std::vector<std::string> names{"theta", "phi"};
  static const char* flat[] = {"t", "u"};
  std::vector<Expr> d{Expr(1.0), pow(sin(X(0)), 2)};
  Expr f(0.0);
  Box dom{{0.05, -2 * M_PI}, {M_PI - 0.05, 2 * M_PI}}, smp{{0.2, -M_PI}, {M_PI - 0.2, M_PI}};
  for (int i = 2; i < n; ++i) {
    names.emplace_back(flat[i - 2]);
    d.emplace_back(1.0);
    f = f + Expr(0.5) * pow(X(i), 2);
    dom.lo.push_back(-5);
    dom.hi.push_back(5);
    smp.lo.push_back(-4.5);
    smp.hi.push_back(4.5);
  }
  s.metric = std::make_shared<const ChartMetric>(s.name, names, dom, diagonal(d), smp);
  s.potential = f;
  s.mu = n;
  return finish(s);
}

std::shared_ptr<const ChartMetric> ellipsoid() {
  const double a = 1.0, b = 1.3;
  const Expr gtt = Expr(a * a) * pow(cos(X(0)), 2) + Expr(b * b) * pow(sin(X(0)), 2);
  const Expr gpp = Expr(a * a) * pow(sin(X(0)), 2);
  return std::make_shared<const ChartMetric>(
      "ellipsoid", std::vector<std::string>{"theta", "phi"},
      Box{{0.05, -2 * M_PI}, {M_PI - 0.05, 2 * M_PI}}, diagonal({gtt, gpp}),
      Box{{0.2, -M_PI}, {M_PI - 0.2, M_PI}});
}

using Builder = std::function<SolitonInstance()>;

const std::vector<std::pair<std::string, Builder>>& registry() {
  static const std::vector<std::pair<std::string, Builder>> r = [] {
    std::vector<std::pair<std::string, Builder>> v;
    for (int n = 2; n <= 4; ++n) v.emplace_back("sphere_" + std::to_string(n), [n] { return sphere(n); });
    for (int n = 2; n <= 4; ++n)
      v.emplace_back("hyperbolic_" + std::to_string(n), [n] { return hyperbolic(n); });
    for (int n = 2; n <= 4; ++n) {
      const std::string name = "gaussian_" + std::to_string(n);
      v.emplace_back(name, [n, name] { return gaussian(n, 1.0, name); });
    }
    v.emplace_back("gaussian_2_rot", gaussian_rot);
    v.emplace_back("cigar", cigar);
    for (int n = 2; n <= 4; ++n)
      v.emplace_back("flat_torus_" + std::to_string(n), [n] { return flat_torus(n); });
    v.emplace_back("cylinder_3", [] { return cylinder(3); });
    v.emplace_back("cylinder_4", [] { return cylinder(4); });
    v.emplace_back("sphere_bad_f", sphere_bad_f);
    return v;
  }();
  return r;
}

std::optional<SolitonInstance> parametric_gaussian(std::string_view name) {
  constexpr std::string_view prefix = "gaussian_";
  if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
  const auto rest = name.substr(prefix.size());
  const auto us = rest.find("_mu=");
  if (us == std::string_view::npos || us != 1) return std::nullopt;
  const int n = rest[0] - '0';
  if (n < 2 || n > kMaxDim) return std::nullopt;
  const std::string val(rest.substr(us + 4));
  double mu = 0;
  try {
    std::size_t used = 0;
    mu = std::stod(val, &used);
    if (used != val.size() || !std::isfinite(mu)) return std::nullopt;
  } catch (const std::logic_error&) {
    return std::nullopt;
  }
  return gaussian(n, mu, std::string(name));
}

}  // namespace

std::vector<std::string> catalog_names() {
  std::vector<std::string> names;
  for (const auto& [n, b] : registry()) names.push_back(n);
  return names;
}

SolitonInstance catalog_get(std::string_view name) {
  for (const auto& [n, b] : registry())
    if (n == name) return b();
  if (auto g = parametric_gaussian(name)) return *g;
  throw UnknownName("unknown catalog instance '" + std::string(name) + "'");
}

std::vector<std::string> metric_only_names() { return {"ellipsoid"}; }

std::shared_ptr<const ChartMetric> metric_get(std::string_view name) {
  if (name == "ellipsoid") return ellipsoid();
  return catalog_get(name).metric;
}

SolitonInstance as_one_form(const SolitonInstance& s) {
  SolitonInstance r = s;
  r.one_form = s.omega();
  r.potential.reset();
  r.name = s.name + "_as_form";
  if (r.trivial) {
    // df of a constant is the literal zero form.
    for (auto& c : r.one_form->data()) c = Expr(0.0);
  }
  return r;
}

TensorValue soliton_residual(const SolitonInstance& s, const LocalGeometry& lg) {
  const int n = s.dim();
  TensorValue ric = value(lg.ricci()), g = value(lg.g());
  TensorValue d2(n, downs(2), 0.0);
  if (s.potential) {
    const JetTensor f = JetTensor::scalar(n, lg.expand(*s.potential));
    d2 = value(lg.nabla(lg.nabla(f)));
  } else {
    const TensorValue dw = value(lg.nabla(lg.expand(*s.one_form)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d2(i, j) = 0.5 * (dw(i, j) + dw(j, i));
  }
  TensorValue r(n, downs(2));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = ric(i, j) + d2(i, j) - s.mu / n * g(i, j);
  return r;
}

TensorValue soliton_residual(const SolitonInstance& s, std::span<const double> p,
                             DiffMode mode) {
  return soliton_residual(s, LocalGeometry(*s.metric, p, mode));
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

struct ParsedFile {
  std::string name;
  std::vector<std::string> coords;
  std::map<std::string, std::pair<std::string, int>> entries;  // key -> (value, line)
  std::string origin;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ParseError(origin + ":" + std::to_string(line) + ": " + msg);
  }
};

ParsedFile read_entries(std::string_view text, const std::string& origin) {
  ParsedFile pf;
  pf.origin = origin;
  std::istringstream is{std::string(text)};
  int lineno = 0;
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) pf.fail(lineno, "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq)), val = trim(t.substr(eq + 1));
    if (key.empty() || val.empty()) pf.fail(lineno, "empty key or value");
    if (pf.entries.count(key)) pf.fail(lineno, "duplicate key '" + key + "'");
    pf.entries[key] = {val, lineno};
  }
  if (!pf.entries.count("coords")) pf.fail(lineno, "missing 'coords'");
  pf.coords = split_ws(pf.entries["coords"].first);
  if (pf.entries.count("name")) pf.name = pf.entries["name"].first;
  if (pf.name.empty()) pf.name = origin;
  return pf;
}

double const_value(const ParsedFile& pf, const std::string& text, int line) {
  const Expr e = parse_expr(text, {});
  if (!e.is_constant()) pf.fail(line, "expected a constant expression");
  const double v = e.eval(std::span<const double>{});
  if (!std::isfinite(v)) pf.fail(line, "non-finite constant");
  return v;
}

Expr field_expr(const ParsedFile& pf, const std::string& key) {
  const auto& [val, line] = pf.entries.at(key);
  try {
    return parse_expr(val, pf.coords);
  } catch (const ParseError& e) {
    pf.fail(line, e.what());
  }
}

ChartMetric build_metric(ParsedFile& pf) {
  const int n = static_cast<int>(pf.coords.size());
  if (n < 2 || n > kMaxDim) pf.fail(pf.entries["coords"].second, "need 2 to 4 coordinates");
  Box dom{std::vector<double>(n), std::vector<double>(n)};
  std::optional<Box> smp;
  auto coord_index = [&](const std::string& c, int line) {
    for (int i = 0; i < n; ++i)
      if (pf.coords[i] == c) return i;
    pf.fail(line, "unknown coordinate '" + c + "'");
  };
  auto read_range = [&](const std::string& key, int line) {
    const auto parts = split_ws(pf.entries[key].first);
    if (parts.size() != 2) pf.fail(line, "expected 'lo hi'");
    return std::pair{const_value(pf, parts[0], line), const_value(pf, parts[1], line)};
  };
  std::vector<bool> have(n, false);
  ExprTensor g(n, downs(2), Expr(0.0));
  std::vector<std::vector<bool>> set(n, std::vector<bool>(n, false));
  for (auto& [key, entry] : pf.entries) {
    const int line = entry.second;
    if (key.rfind("domain.", 0) == 0 || key.rfind("sample.", 0) == 0) {
      const bool is_dom = key[0] == 'd';
      const int i = coord_index(key.substr(7), line);
      const auto [lo, hi] = read_range(key, line);
      if (is_dom) {
        dom.lo[i] = lo;
        dom.hi[i] = hi;
        have[i] = true;
      } else {
        if (!smp) smp = Box{std::vector<double>(n, NAN), std::vector<double>(n, NAN)};
        smp->lo[i] = lo;
        smp->hi[i] = hi;
      }
    } else if (key.rfind("g.", 0) == 0) {
      const auto rest = key.substr(2);
      const auto dot = rest.find('.');
      if (dot == std::string::npos) pf.fail(line, "metric key must be g.<a>.<b>");
      const int a = coord_index(rest.substr(0, dot), line);
      const int b = coord_index(rest.substr(dot + 1), line);
      if (set[a][b]) pf.fail(line, "metric component given twice");
      g(a, b) = g(b, a) = field_expr(pf, key);
      set[a][b] = set[b][a] = true;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!have[i]) pf.fail(pf.entries["coords"].second, "missing domain." + pf.coords[i]);
    if (!set[i][i]) pf.fail(pf.entries["coords"].second, "missing g." + pf.coords[i] + "." +
                                                              pf.coords[i]);
  }
  if (smp) {
    for (int i = 0; i < n; ++i)
      if (std::isnan(smp->lo[i])) {
        smp->lo[i] = dom.lo[i];
        smp->hi[i] = dom.hi[i];
      }
  }
  return ChartMetric(pf.name, pf.coords, dom, g, smp);
}

bool is_metric_key(const std::string& k) {
  return k == "name" || k == "coords" || k.rfind("domain.", 0) == 0 ||
         k.rfind("sample.", 0) == 0 || k.rfind("g.", 0) == 0;
}

}  // namespace

ChartMetric parse_metric(std::string_view text, const std::string& origin) {
  ParsedFile pf = read_entries(text, origin);
  for (const auto& [key, entry] : pf.entries)
    if (!is_metric_key(key) && key != "f" && key != "mu" && key != "expect" &&
        key.rfind("omega.", 0) != 0)
      pf.fail(entry.second, "unknown key '" + key + "'");
  return build_metric(pf);
}

SolitonInstance parse_instance(std::string_view text, const std::string& origin) {
  ParsedFile pf = read_entries(text, origin);
  SolitonInstance s;
  s.metric = std::make_shared<const ChartMetric>(build_metric(pf));
  s.name = pf.name;
  const int n = s.metric->dim();
  bool any_omega = false;
  ExprTensor w(n, downs(1), Expr(0.0));
  for (const auto& [key, entry] : pf.entries) {
    if (is_metric_key(key)) continue;
    if (key == "f") {
      s.potential = field_expr(pf, key);
    } else if (key == "mu") {
      s.mu = const_value(pf, entry.first, entry.second);
    } else if (key == "expect") {
      if (entry.first == "soliton")
        s.expected_soliton = true;
      else if (entry.first == "non-example")
        s.expected_soliton = false;
      else
        pf.fail(entry.second, "expect must be 'soliton' or 'non-example'");
    } else if (key.rfind("omega.", 0) == 0) {
      const std::string c = key.substr(6);
      int i = -1;
      for (int k = 0; k < n; ++k)
        if (pf.coords[k] == c) i = k;
      if (i < 0) pf.fail(entry.second, "unknown coordinate '" + c + "'");
      w(i) = field_expr(pf, key);
      any_omega = true;
    } else {
      pf.fail(entry.second, "unknown key '" + key + "'");
    }
  }
  if (!pf.entries.count("mu")) pf.fail(0, "missing 'mu'");
  if (any_omega && s.potential) pf.fail(0, "give either f or omega.<c>, not both");
  if (!any_omega && !s.potential) pf.fail(0, "missing potential 'f' or 'omega.<c>' entries");
  if (any_omega) s.one_form = w;
  s.cls = class_of(s.mu);
  if (s.potential) {
    s.trivial = s.potential->is_constant();
  } else {
    bool zero = true;
    for (const auto& c : w.data()) zero = zero && c.op() == Expr::Op::Const && c.constant_value() == 0.0;
    s.trivial = zero;
  }
  s.validate();
  return s;
}

SolitonInstance load_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open expression file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str(), path.string());
}

}  // namespace rw
