#include "rw/identities.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "rw/eigen_analysis.hpp"
#include "rw/errors.hpp"
#include "rw/parallel.hpp"
#include "rw/sampling.hpp"

namespace rw {

std::string to_string(IdentityId id) { return "I" + std::to_string(static_cast<int>(id)); }

IdentityId parse_identity(std::string_view tag) {
  std::string_view t = tag;
  if (!t.empty() && (t[0] == 'I' || t[0] == 'i')) t.remove_prefix(1);
  int v = 0;
  bool ok = !t.empty() && t.size() <= 2;
  for (char c : t) {
    if (c < '0' || c > '9') ok = false;
    v = v * 10 + (c - '0');
  }
  if (!ok || v < 1 || v > kIdentityCount)
    throw UnknownName("unknown identity '" + std::string(tag) + "' (expected I1..I14)");
  return static_cast<IdentityId>(v);
}

const char* describe(IdentityId id) noexcept {
  switch (id) {
    case IdentityId::I1: return "R + Laplace f = mu";
    case IdentityId::I2: return "grad R = 2 Ric(grad f)";
    case IdentityId::I3: return "Ricci commutator equals Riemann(grad f)";
    case IdentityId::I4: return "R + |grad f|^2 - 2 mu f / n is constant";
    case IdentityId::I5: return "scalar curvature Laplacian";
    case IdentityId::I6: return "Ricci rough Laplacian";
    case IdentityId::I7: return "Ricci rough Laplacian, Weyl form";
    case IdentityId::I8: return "contracted Bianchi (Schur)";
    case IdentityId::I9: return "Riemann decomposition / Weyl properties";
    case IdentityId::I10: return "covariant derivative interchange on 1-forms";
    case IdentityId::I11: return "two-dimensional relations";
    case IdentityId::I12: return "weighted divergence of the soliton tensor";
    case IdentityId::I13: return "scalar curvature Laplacian with the soliton 1-form";
    case IdentityId::I14: return "eigenvalue polynomial factorization";
  }
  return "?";
}

std::vector<IdentityId> all_identities() {
  std::vector<IdentityId> v;
  for (int i = 1; i <= kIdentityCount; ++i) v.push_back(static_cast<IdentityId>(i));
  return v;
}

bool admissible(IdentityId id, const SolitonInstance& s) {
  const int n = s.dim();
  switch (id) {
    case IdentityId::I8:
    case IdentityId::I7:
      if (n < 3) return false;
      break;
    case IdentityId::I11:
      if (n != 2) return false;
      break;
    default: break;
  }
  if (s.is_gradient()) return true;
  return id == IdentityId::I8 || id == IdentityId::I9 || id == IdentityId::I10 ||
         id == IdentityId::I13 || id == IdentityId::I14;
}

std::vector<IdentityId> admissible_identities(const SolitonInstance& s) {
  std::vector<IdentityId> v;
  for (auto id : all_identities())
    if (admissible(id, s)) v.push_back(id);
  return v;
}

double default_tolerance(IdentityId, DiffMode mode) {
  return mode == DiffMode::Jet ? 1e-5 : 1e-4;
}

double tolerance_for(IdentityId id, const SuiteConfig& cfg) {
  if (auto it = cfg.per_identity_tol.find(id); it != cfg.per_identity_tol.end()) return it->second;
  if (cfg.tolerance) return *cfg.tolerance;
  return default_tolerance(id, cfg.mode);
}

ExprTensor test_one_form(int dim, int index) {
  ExprTensor w(dim, downs(1));
  const double a = 0.7 + 0.3 * index, c = 0.1 + 0.05 * index;
  for (int k = 0; k < dim; ++k) {
    const Expr xk = Expr::var(k), xn = Expr::var((k + 1) % dim),
               xm = Expr::var((k + index + 1) % dim);
    w(k) = sin(Expr(a) * xk + Expr(0.2 * (k + 1)) * xn) + Expr(c) * cos(xm) * xk;
  }
  return w;
}

namespace {

// Lazily computed derived fields at one point.
class Ctx {
 public:
  Ctx(const SolitonInstance& s, const LocalGeometry& lg)
      : s_(s), lg_(lg), n_(lg.dim()), g_(value(lg.g())), gi_(value(lg.ginv())),
        ric_(value(lg.ricci())), R_(lg.scalar().value()) {}

  int n() const { return n_; }
  const TensorValue& g() const { return g_; }
  const TensorValue& gi() const { return gi_; }
  const TensorValue& ric() const { return ric_; }
  double R() const { return R_; }
  double mu() const { return s_.mu; }
  const LocalGeometry& lg() const { return lg_; }

  const Jet& f() {
    if (!f_) f_ = lg_.expand(*s_.potential);
    return *f_;
  }
  const JetTensor& df() {
    if (!df_) df_ = lg_.nabla(JetTensor::scalar(n_, f()));
    return *df_;
  }
  const JetTensor& ddf() {
    if (!ddf_) ddf_ = lg_.nabla(df());
    return *ddf_;
  }
  // w as values: df for gradient instances, the stored form otherwise.
  TensorValue omega() {
    if (s_.potential) return value(df());
    return value(lg_.expand(*s_.one_form));
  }
  const JetTensor& dR() {
    if (!dR_) dR_ = lg_.nabla(JetTensor::scalar(n_, lg_.scalar()));
    return *dR_;
  }
  double lapR() {
    if (!lapR_) lapR_ = lg_.trace(lg_.nabla(dR()), 0, 1)[0].value();
    return *lapR_;
  }
  const JetTensor& dRic() {
    if (!dRic_) dRic_ = lg_.nabla(lg_.ricci());
    return *dRic_;
  }
  const TensorValue& lapRic() {
    if (!lapRic_) lapRic_ = value(lg_.trace(lg_.nabla(dRic()), 0, 1));
    return *lapRic_;
  }
  const TensorValue& rm() {
    if (!rm_) rm_ = value(lg_.riemann());
    return *rm_;
  }
  const TensorValue& ric_up() {
    if (!ricup_) {
      TensorValue r(n_, {Valence::Up, Valence::Up}, 0.0);
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b)
          for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(a, b) += gi_(a, i) * gi_(b, j) * ric_(i, j);
      ricup_ = r;
    }
    return *ricup_;
  }
  TensorValue up(const TensorValue& w) const {
    TensorValue r(n_, {Valence::Up}, 0.0);
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) r(a) += gi_(a, b) * w(b);
    return r;
  }
  double S() {
    const TensorValue& ru = ric_up();
    double s = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) s += ric_(i, j) * ru(i, j);
    return s;
  }
  double norm(const TensorValue& t) const { return frame_norm(t, g_); }

 private:
  const SolitonInstance& s_;
  const LocalGeometry& lg_;
  int n_;
  TensorValue g_, gi_, ric_;
  double R_;
  std::optional<Jet> f_;
  std::optional<JetTensor> df_, ddf_, dR_, dRic_;
  std::optional<double> lapR_;
  std::optional<TensorValue> lapRic_, rm_, ricup_;
};

TensorValue zeros(int n, int rank) { return TensorValue(n, downs(rank), 0.0); }

double interchange_residual(Ctx& c, const JetTensor& w) {
  const int n = c.n();
  const LocalGeometry& lg = c.lg();
  const TensorValue h = value(lg.nabla(lg.nabla(w)));
  const TensorValue wu = c.up(value(w));
  const TensorValue& rm = c.rm();
  TensorValue r = zeros(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = h(i, j, k) - h(j, i, k);
        for (int s = 0; s < n; ++s) v -= rm(i, j, k, s) * wu(s);
        r(i, j, k) = v;
      }
  return c.norm(r);
}

}  // namespace

double interchange_residual(const LocalGeometry& lg, const ExprTensor& w) {
  if (w.dim() != lg.dim() || w.rank() != 1) throw ShapeMismatch("interchange needs a 1-form of the chart dimension");
  const SolitonInstance none;
  Ctx c(none, lg);
  return interchange_residual(c, lg.expand(w));
}

namespace {

// Ricci Laplacian residual minus the Riemann/Weyl term, shared by I6 and I7.
TensorValue ricci_laplacian_base(Ctx& c) {
  const int n = c.n();
  const TensorValue& lap = c.lapRic();
  const TensorValue dric = value(c.dRic());
  const TensorValue dfu = c.up(value(c.df()));
  TensorValue r = zeros(n, 2);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double v = lap(i, k) - 2 * c.mu() / n * c.ric()(i, k);
      for (int a = 0; a < n; ++a) v -= dfu(a) * dric(a, i, k);
      r(i, k) = v;
    }
  return r;
}

double eval_identity(IdentityId id, const SolitonInstance& s, Ctx& c) {
  const int n = c.n();
  const double mu = s.mu;
  const TensorValue &g = c.g(), &gi = c.gi(), &ric = c.ric();
  const double R = c.R();
  switch (id) {
    case IdentityId::I1: {
      const double lapf = c.lg().trace(c.ddf(), 0, 1)[0].value();
      return std::abs(R + lapf - mu);
    }
    case IdentityId::I2: {
      const TensorValue dR = value(c.dR()), dfu = c.up(value(c.df()));
      TensorValue r = zeros(n, 1);
      for (int i = 0; i < n; ++i) {
        double v = dR(i);
        for (int j = 0; j < n; ++j) v -= 2 * ric(i, j) * dfu(j);
        r(i) = v;
      }
      return c.norm(r);
    }
    case IdentityId::I3: {
      const TensorValue d = value(c.dRic()), dfu = c.up(value(c.df()));
      const TensorValue& rm = c.rm();
      TensorValue r = zeros(n, 3);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            double v = d(j, i, k) - d(i, j, k);
            for (int q = 0; q < n; ++q) v -= rm(i, j, k, q) * dfu(q);
            r(i, j, k) = v;
          }
      return c.norm(r);
    }
    case IdentityId::I4: {
      const TensorValue df = value(c.df());
      double grad2 = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) grad2 += gi(i, j) * df(i) * df(j);
      return R + grad2 - 2 * mu / n * c.f().value();
    }
    case IdentityId::I5: {
      const TensorValue dR = value(c.dR()), dfu = c.up(value(c.df()));
      double v = c.lapR() - 2 * mu / n * R + 2 * c.S();
      for (int i = 0; i < n; ++i) v -= dR(i) * dfu(i);
      return std::abs(v);
    }
    case IdentityId::I6: {
      TensorValue r = ricci_laplacian_base(c);
      const TensorValue& rm = c.rm();
      const TensorValue& ru = c.ric_up();
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          double v = 0;
          for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) v += rm(i, j, k, l) * ru(j, l);
          r(i, k) += 2 * v;
        }
      return c.norm(r);
    }
    case IdentityId::I7: {
      TensorValue r = ricci_laplacian_base(c);
      const TensorValue& ru = c.ric_up();
      const TensorValue w = c.lg().weyl();
      const double S = c.S();
      TensorValue sik = zeros(n, 2);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
          for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) sik(i, k) += ric(i, j) * gi(j, l) * ric(l, k);
      const double cf = 2.0 / ((n - 1.0) * (n - 2.0));
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          double wt = 0;
          if (n > 3)
            for (int j = 0; j < n; ++j)
              for (int l = 0; l < n; ++l) wt += w(i, j, k, l) * ru(j, l);
          r(i, k) += 2 * wt - cf * (R * R * g(i, k) - n * R * ric(i, k) +
                                    2 * (n - 1.0) * sik(i, k) - (n - 1.0) * S * g(i, k));
        }
      return c.norm(r);
    }
    case IdentityId::I8: {
      const TensorValue div = value(c.lg().trace(c.dRic(), 0, 2));
      const TensorValue dR = value(c.dR());
      TensorValue r = zeros(n, 1);
      for (int i = 0; i < n; ++i) r(i) = 2 * div(i) - dR(i);
      return c.norm(r);
    }
    case IdentityId::I9: {
      const TensorValue& rm = c.rm();
      if (n == 2) {
        TensorValue r = zeros(n, 4);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
              for (int l = 0; l < n; ++l)
                r(i, j, k, l) =
                    rm(i, j, k, l) - R / 2 * (g(i, k) * g(j, l) - g(i, l) * g(j, k));
        return c.norm(r);
      }
      const TensorValue w = c.lg().weyl();
      double worst = n == 3 ? c.norm(w) : 0.0;
      // Traces over (1,3), (1,4), (2,3), (2,4); the remaining pairs vanish by antisymmetry.
      const int pairs[4][2] = {{0, 2}, {0, 3}, {1, 2}, {1, 3}};
      for (const auto& pr : pairs) {
        TensorValue t = zeros(n, 2);
        for (std::size_t k = 0; k < w.size(); ++k) {
          const auto idx = w.unflat(k);
          int rest[2], q = 0;
          for (int sl = 0; sl < 4; ++sl)
            if (sl != pr[0] && sl != pr[1]) rest[q++] = idx[sl];
          t(rest[0], rest[1]) += gi(idx[pr[0]], idx[pr[1]]) * w[k];
        }
        worst = std::max(worst, c.norm(t));
      }
      return worst;
    }
    case IdentityId::I10: {
      const JetTensor w0 = s.potential ? c.df() : c.lg().expand(*s.one_form);
      double worst = interchange_residual(c, w0);
      for (int k = 0; k < 3; ++k)
        worst = std::max(worst, interchange_residual(c, c.lg().expand(test_one_form(n, k))));
      return worst;
    }
    case IdentityId::I11: {
      const TensorValue ddf = value(c.ddf()), df = value(c.df()), dR = value(c.dR());
      const TensorValue dfu = c.up(df);
      TensorValue a = zeros(n, 2), b = zeros(n, 1);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = ddf(i, j) - (mu - R) / 2 * g(i, j);
        b(i) = dR(i) - R * df(i);
      }
      double sc = c.lapR() - mu * R + R * R;
      for (int i = 0; i < n; ++i) sc -= dR(i) * dfu(i);
      return std::max({c.norm(a), c.norm(b), std::abs(sc)});
    }
    case IdentityId::I12: {
      const LocalGeometry& lg = c.lg();
      const Jet ef = exp(-c.f());
      JetTensor X(n, downs(2));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          X(i, j) = 2.0 * (lg.ricci()(i, j) + c.ddf()(i, j) - (mu / n) * lg.g()(i, j)) * ef;
      const TensorValue divX = value(lg.trace(lg.nabla(X), 0, 2));
      const Jet lapf = lg.trace(c.ddf(), 0, 1)[0];
      const Jet Q = lg.scalar() + 2.0 * lapf - lg.dot(c.df(), c.df()) + (2 * mu / n) * c.f();
      const TensorValue dQ = value(lg.nabla(JetTensor::scalar(n, Q)));
      TensorValue r = zeros(n, 1);
      for (int i = 0; i < n; ++i) r(i) = divX(i) - dQ(i) * ef.value();
      return c.norm(r);
    }
    case IdentityId::I13: {
      const TensorValue dR = value(c.dR()), wu = c.up(c.omega());
      double v = c.lapR() - 2 * mu / n * R + 2 * c.S();
      for (int i = 0; i < n; ++i) v -= dR(i) * wu(i);
      return std::abs(v);
    }
    case IdentityId::I14: {
      const std::vector<double> ev = generalized_eigenvalues(ric, g);
      const double lam = ev.front();
      double Rs = 0, Ss = 0;
      for (double e : ev) {
        Rs += e;
        Ss += e * e;
      }
      const double p = eigen_polynomial(n, lam, Rs, Ss);
      const double q = eigen_factored(n, lam, Rs - lam, Ss - lam * lam);
      return std::abs(p - q) / (1.0 + std::abs(p));
    }
  }
  throw std::logic_error("unhandled identity");
}

struct PointResult {
  std::vector<double> values;
  std::vector<std::string> errors;  // empty string = ok
};

PointResult evaluate_point(const std::vector<IdentityId>& ids, const SolitonInstance& s,
                           std::span<const double> p, DiffMode mode) {
  PointResult r;
  r.values.assign(ids.size(), 0.0);
  r.errors.assign(ids.size(), {});
  try {
    const LocalGeometry lg(*s.metric, p, mode);
    Ctx c(s, lg);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      try {
        r.values[k] = eval_identity(ids[k], s, c);
      } catch (const std::exception& e) {
        r.errors[k] = e.what();
      }
    }
  } catch (const std::exception& e) {
    for (auto& err : r.errors) err = e.what();
  }
  return r;
}

IdentityReport aggregate(IdentityId id, const SolitonInstance& s,
                         const std::vector<std::vector<double>>& points,
                         const std::vector<PointResult>& res, std::size_t slot, double tol) {
  IdentityReport rep;
  rep.identity = id;
  rep.instance = s.name;
  rep.samples = static_cast<int>(points.size());
  rep.tolerance = tol;
  for (std::size_t k = 0; k < res.size(); ++k)
    if (!res[k].errors[slot].empty()) {
      rep.error = res[k].errors[slot];
      rep.pass = false;
      rep.max_residual = rep.mean_residual = std::numeric_limits<double>::infinity();
      rep.worst_point = points[k];
      return rep;
    }
  std::vector<double> r(res.size());
  for (std::size_t k = 0; k < res.size(); ++k) r[k] = res[k].values[slot];
  if (id == IdentityId::I4) {
    double mean = 0;
    for (double v : r) mean += v;
    mean /= std::max<std::size_t>(1, r.size());
    double var = 0;
    for (double v : r) var += (v - mean) * (v - mean);
    rep.value_mean = mean;
    rep.value_std = std::sqrt(var / std::max<std::size_t>(1, r.size()));
    for (double& v : r) v = std::abs(v - mean);
  }
  double sum = 0;
  std::size_t worst = 0;
  bool finite = true;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!std::isfinite(r[k])) finite = false;
    sum += r[k];
    if (r[k] > r[worst] || !std::isfinite(r[k])) worst = k;
  }
  rep.max_residual = r.empty() ? 0.0 : r[worst];
  rep.mean_residual = r.empty() ? 0.0 : sum / r.size();
  if (!r.empty()) rep.worst_point = points[worst];
  rep.pass = finite && rep.max_residual <= tol;
  return rep;
}

}  // namespace

double identity_value(IdentityId id, const SolitonInstance& s, const LocalGeometry& lg) {
  if (!admissible(id, s))
    throw DimensionMismatch(to_string(id) + " is not admissible for instance '" + s.name + "'");
  Ctx c(s, lg);
  return eval_identity(id, s, c);
}

IdentityReport check_identity(IdentityId id, const SolitonInstance& s,
                              const std::vector<std::vector<double>>& points, double tol,
                              DiffMode mode, int threads) {
  if (!admissible(id, s))
    throw DimensionMismatch(to_string(id) + " is not admissible for instance '" + s.name +
                            "' (n = " + std::to_string(s.dim()) + ")");
  const std::vector<IdentityId> ids{id};
  std::vector<PointResult> res(points.size());
  parallel_for(points.size(), threads,
               [&](std::size_t k) { res[k] = evaluate_point(ids, s, points[k], mode); });
  return aggregate(id, s, points, res, 0, tol);
}

std::vector<IdentityReport> run_suite(const SolitonInstance& s, const SuiteConfig& cfg) {
  std::vector<IdentityId> ids;
  if (cfg.only) {
    if (!admissible(*cfg.only, s))
      throw DimensionMismatch(to_string(*cfg.only) + " is not admissible for instance '" +
                              s.name + "'");
    ids.push_back(*cfg.only);
  } else {
    ids = admissible_identities(s);
  }
  const auto points = sample_points(s.metric->sample_box(), cfg.samples, cfg.seed);
  std::vector<PointResult> res(points.size());
  parallel_for(points.size(), cfg.threads,
               [&](std::size_t k) { res[k] = evaluate_point(ids, s, points[k], cfg.mode); });
  std::vector<IdentityReport> out;
  for (std::size_t k = 0; k < ids.size(); ++k)
    out.push_back(aggregate(ids[k], s, points, res, k, tolerance_for(ids[k], cfg)));
  return out;
}

}  // namespace rw
