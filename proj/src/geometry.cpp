#include "rw/geometry.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace rw {

bool Box::contains(std::span<const double> p, double margin) const {
  if (static_cast<int>(p.size()) != dim()) return false;
  for (int v = 0; v < dim(); ++v)
    if (!(p[v] >= lo[v] + margin && p[v] <= hi[v] - margin)) return false;
  return true;
}

Box Box::shrunk(double margin) const {
  Box b = *this;
  for (int v = 0; v < dim(); ++v) {
    b.lo[v] += margin;
    b.hi[v] -= margin;
  }
  return b;
}

const char* to_string(DiffMode m) noexcept {
  return m == DiffMode::Jet ? "jet" : "finite-difference";
}

ChartMetric::ChartMetric(std::string name, std::vector<std::string> coords, Box domain,
                         ExprTensor g, std::optional<Box> sample)
    : name_(std::move(name)),
      coords_(std::move(coords)),
      domain_(std::move(domain)),
      sample_(sample ? std::move(*sample) : domain_),
      g_(std::move(g)) {
  const int n = dim();
  if (n < 2 || n > kMaxDim)
    throw DimensionMismatch("chart '" + name_ + "': dimension must be in [2, " +
                            std::to_string(kMaxDim) + "]");
  if (domain_.dim() != n || sample_.dim() != n)
    throw DimensionMismatch("chart '" + name_ + "': box dimension does not match coordinates");
  if (g_.dim() != n || g_.valence() != downs(2))
    throw ShapeMismatch("chart '" + name_ + "': metric must be an n x n (0,2) block");
  for (int v = 0; v < n; ++v) {
    if (!(domain_.lo[v] < domain_.hi[v]))
      throw ParseError("chart '" + name_ + "': empty domain along " + coords_[v]);
    if (sample_.lo[v] < domain_.lo[v] || sample_.hi[v] > domain_.hi[v] ||
        !(sample_.lo[v] <= sample_.hi[v]))
      throw ParseError("chart '" + name_ + "': sample box must lie inside the domain along " +
                       coords_[v]);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (g_(i, j).max_var() >= n)
        throw DimensionMismatch("chart '" + name_ + "': metric references unknown coordinate");
}

void ChartMetric::require_inside(std::span<const double> p, double margin) const {
  if (static_cast<int>(p.size()) != dim())
    throw DimensionMismatch("point has " + std::to_string(p.size()) + " coordinates, chart '" +
                            name_ + "' has " + std::to_string(dim()));
  if (!domain_.contains(p, margin))
    throw OutOfDomain("point lies outside the domain of chart '" + name_ + "'");
}

TensorValue ChartMetric::metric_at(std::span<const double> p) const {
  require_inside(p);
  TensorValue g(dim(), downs(2));
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) g(i, j) = g_(i, j).eval(p);
  cholesky(g);
  return g;
}

std::vector<double> cholesky(const TensorValue& g) {
  const int n = g.dim();
  std::vector<double> L(static_cast<std::size_t>(n * n), 0.0);
  for (int j = 0; j < n; ++j) {
    double d = g(j, j);
    for (int k = 0; k < j; ++k) d -= L[j * n + k] * L[j * n + k];
    if (!(d > 0.0) || !std::isfinite(d))
      throw NonPositiveDefinite("metric block is not positive definite");
    L[j * n + j] = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = g(i, j);
      for (int k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
      L[i * n + j] = s / L[j * n + j];
    }
  }
  return L;
}

namespace {

// 1-D sixth-order central stencils on offsets -3..3, indexed by derivative order.
constexpr std::array<std::array<double, 7>, 3> kStencil{{
    {0, 0, 0, 1, 0, 0, 0},
    {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0, 3.0 / 4, -3.0 / 20, 1.0 / 60},
    {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90},
}};

double fd_step(int total_order, double x) {
  const double eps = std::numeric_limits<double>::epsilon();
  return std::pow(eps, 1.0 / (5.0 + total_order)) * std::max(1.0, std::abs(x));
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// d^alpha e at p for |alpha| > 2: the exact second derivative d^beta e
// (beta = the first two units of alpha) differenced along gamma = alpha - beta
// with 7-point stencils, step balanced for the order of gamma.
double fd_partial(const Expr& e, std::span<const double> p, const MultiIndex& alpha) {
  const int n = static_cast<int>(p.size());
  const JetSpace& space = JetSpace::of(n);
  MultiIndex beta{}, gamma = alpha;
  for (int v = 0, left = 2; v < n && left > 0; ++v) {
    const int take = std::min<int>(left, gamma[v]);
    beta[v] = take;
    gamma[v] -= take;
    left -= take;
  }
  int k = 0;
  for (int v = 0; v < n; ++v) k += gamma[v];
  std::array<double, kMaxDim> h{};
  for (int v = 0; v < n; ++v) h[v] = fd_step(k, p[v]);
  const int bidx = space.index(beta);
  double bfact = 1.0;
  for (int v = 0; v < n; ++v) bfact *= factorial(beta[v]);

  std::vector<double> x(p.begin(), p.end());
  std::array<Jet, kMaxDim> vars;
  double acc = 0.0;
  // Odometer over the tensor-product stencil, skipping zero weights.
  std::array<int, kMaxDim> s{};
  auto weight = [&](int v, int off) { return kStencil[gamma[v]][off + 3]; };
  for (int v = 0; v < n; ++v) s[v] = -3;
  for (;;) {
    double w = 1.0;
    for (int v = 0; v < n && w != 0.0; ++v) w *= weight(v, s[v]);
    if (w != 0.0) {
      for (int v = 0; v < n; ++v) vars[v] = Jet::variable(space, 2, v, p[v] + s[v] * h[v]);
      acc += w * e.eval(std::span<const Jet>(vars.data(), n)).coeff(bidx) * bfact;
    }
    int v = 0;
    while (v < n && ++s[v] > 3) s[v++] = -3;
    if (v == n) break;
  }
  for (int v = 0; v < n; ++v) acc /= std::pow(h[v], gamma[v]);
  return acc;
}

}  // namespace

Jet expand(const Expr& e, std::span<const double> p, int order, DiffMode mode,
           const Box& box) {
  const int n = static_cast<int>(p.size());
  const JetSpace& space = JetSpace::of(n);
  if (mode == DiffMode::Jet) {
    if (!box.contains(p)) throw OutOfDomain("expansion point lies outside the domain");
    std::array<Jet, kMaxDim> x;
    for (int v = 0; v < n; ++v) x[v] = Jet::variable(space, order, v, p[v]);
    return e.eval(std::span<const Jet>(x.data(), n));
  }
  for (int v = 0; v < n; ++v) {
    const double reach = 3.0 * fd_step(1, p[v]);
    if (!(p[v] - reach >= box.lo[v] && p[v] + reach <= box.hi[v]))
      throw OutOfDomain("finite-difference stencil leaves the domain");
  }
  Jet r = Jet::constant(space, order, 0.0);
  if (e.is_constant()) {
    r.coeff(0) = e.eval(p);
    return r;
  }
  std::array<Jet, kMaxDim> x;
  for (int v = 0; v < n; ++v) x[v] = Jet::variable(space, std::min(order, 2), v, p[v]);
  const Jet low = e.eval(std::span<const Jet>(x.data(), n));
  for (int idx = 0; idx < space.size(order); ++idx) {
    if (idx < space.size(2)) {
      r.coeff(idx) = low.coeff(idx);
      continue;
    }
    const MultiIndex& a = space.monomial(idx);
    double w = 1.0;
    for (int v = 0; v < n; ++v) w *= factorial(a[v]);
    r.coeff(idx) = fd_partial(e, p, a) / w;
  }
  return r;
}

JetTensor expand(const ExprTensor& t, std::span<const double> p, int order, DiffMode mode,
                 const Box& box) {
  JetTensor r(t.dim(), t.valence());
  for (std::size_t k = 0; k < t.size(); ++k) r[k] = expand(t[k], p, order, mode, box);
  return r;
}

TensorValue value(const JetTensor& t) {
  return t.map([](const Jet& j) { return j.value(); });
}

LocalGeometry::LocalGeometry(const ChartMetric& m, std::span<const double> p, DiffMode mode)
    : m_(&m), p_(p.begin(), p.end()), mode_(mode) {
  const int n = m.dim();
  m.require_inside(p);
  const JetSpace& sp = space();
  const ExprTensor& ge = m.components();

  g_ = JetTensor(n, downs(2));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      g_(i, j) = rw::expand(ge(i, j), p, kMaxOrder, mode, m.domain());
      g_(j, i) = g_(i, j);
    }

  // g^{-1} = sum_k (-A E)^k A with A = g(p)^{-1} and E = g - g(p) nilpotent.
  const TensorValue g0 = value(g_);
  const std::vector<double> L = cholesky(g0);
  TensorValue a0(n, {Valence::Up, Valence::Up});
  for (int c = 0; c < n; ++c) {
    std::array<double, kMaxDim> y{}, x{};
    for (int i = 0; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) s -= L[i * n + k] * y[k];
      y[i] = s / L[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = y[i];
      for (int k = i + 1; k < n; ++k) s -= L[k * n + i] * x[k];
      x[i] = s / L[i * n + i];
    }
    for (int i = 0; i < n; ++i) a0(i, c) = x[i];
  }
  JetTensor term(n, {Valence::Up, Valence::Up});
  for (std::size_t k = 0; k < term.size(); ++k) term[k] = Jet::constant(sp, kMaxOrder, a0[k]);
  ginv_ = term;
  for (int it = 1; it <= kMaxOrder; ++it) {
    // B = E * term, then term = -A * B.
    JetTensor b(n, {Valence::Down, Valence::Up});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet s = Jet::constant(sp, kMaxOrder, 0.0);
        for (int k = 0; k < n; ++k) {
          Jet e = g_(i, k);
          e.coeff(0) = 0.0;
          s += e * term(k, j);
        }
        b(i, j) = s;
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet s = Jet::constant(sp, kMaxOrder, 0.0);
        for (int k = 0; k < n; ++k) s += a0(i, k) * b(k, j);
        term(i, j) = -s;
        ginv_(i, j) += term(i, j);
      }
  }

  std::vector<Jet> dg(static_cast<std::size_t>(n * n * n));
  for (int s = 0; s < n; ++s)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg[(s * n + i) * n + j] = derivative(g_(i, j), s);
  auto DG = [&](int s, int i, int j) -> const Jet& { return dg[(s * n + i) * n + j]; };

  gamma_ = JetTensor(n, {Valence::Up, Valence::Down, Valence::Down});
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet s = Jet::constant(sp, kMaxOrder - 1, 0.0);
        for (int q = 0; q < n; ++q)
          s += ginv_(k, q) * (DG(i, q, j) + DG(j, q, i) - DG(q, i, j));
        s *= 0.5;
        gamma_(k, i, j) = s;
        gamma_(k, j, i) = s;
      }

  // dG(i, m, j, l) = d_i Gamma^m_jl
  std::vector<Jet> dgam(static_cast<std::size_t>(n * n * n * n));
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < gamma_.size(); ++k)
      dgam[i * gamma_.size() + k] = derivative(gamma_[k], i);
  auto DGam = [&](int i, int mm, int j, int l) -> const Jet& {
    return dgam[((i * n + mm) * n + j) * n + l];
  };
  const int ro = kMaxOrder - 2;
  JetTensor rup(n, {Valence::Down, Valence::Down, Valence::Down, Valence::Up});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        for (int mm = 0; mm < n; ++mm) {
          if (i == j) {
            rup(i, j, l, mm) = Jet::constant(sp, ro, 0.0);
            continue;
          }
          if (j < i) {
            rup(i, j, l, mm) = -rup(j, i, l, mm);
            continue;
          }
          Jet s = DGam(i, mm, j, l) - DGam(j, mm, i, l);
          for (int q = 0; q < n; ++q)
            s += (gamma_(mm, i, q) * gamma_(q, j, l) - gamma_(mm, j, q) * gamma_(q, i, l))
                     .truncated(ro);
          rup(i, j, l, mm) = s;
        }
  riemann_ = JetTensor(n, downs(4));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Jet s = Jet::constant(sp, ro, 0.0);
          for (int mm = 0; mm < n; ++mm) s += g_(k, mm) * rup(i, j, l, mm);
          riemann_(i, j, k, l) = s;
        }

  ricci_ = JetTensor(n, downs(2));
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      Jet s = Jet::constant(sp, ro, 0.0);
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) s += ginv_(j, l) * riemann_(i, j, k, l);
      ricci_(i, k) = s;
      ricci_(k, i) = s;
    }
  scalar_ = Jet::constant(sp, ro, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) scalar_ += ginv_(i, k) * ricci_(i, k);
}

Jet LocalGeometry::expand(const Expr& f) const {
  return rw::expand(f, p_, kMaxOrder, mode_, m_->domain());
}

JetTensor LocalGeometry::expand(const ExprTensor& t) const {
  if (t.dim() != dim()) throw DimensionMismatch("field dimension does not match the chart");
  return rw::expand(t, p_, kMaxOrder, mode_, m_->domain());
}

Jet LocalGeometry::constant(double v) const { return Jet::constant(space(), kMaxOrder, v); }

JetTensor LocalGeometry::nabla(const JetTensor& t) const {
  const int n = dim();
  if (t.dim() != n) throw DimensionMismatch("field dimension does not match the chart");
  std::vector<Valence> val{Valence::Down};
  val.insert(val.end(), t.valence().begin(), t.valence().end());
  JetTensor r(n, val);
  const int rank = t.rank();
  std::vector<int> idx;
  for (int a = 0; a < n; ++a) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      Jet v = derivative(t[k], a);
      idx = t.unflat(k);
      for (int s = 0; s < rank; ++s) {
        const int orig = idx[s];
        for (int q = 0; q < n; ++q) {
          idx[s] = q;
          const Jet& tq = t[t.flat(idx)];
          if (t.valence(s) == Valence::Up)
            v += gamma_(orig, a, q) * tq;
          else
            v -= gamma_(q, a, orig) * tq;
        }
        idx[s] = orig;
      }
      r[a * t.size() + k] = v;
    }
  }
  return r;
}

JetTensor LocalGeometry::raise(const JetTensor& t, int slot) const {
  if (t.valence(slot) != Valence::Down) throw ShapeMismatch("raise: slot is not covariant");
  auto val = t.valence();
  val[slot] = Valence::Up;
  JetTensor r(t.dim(), val);
  for (std::size_t k = 0; k < t.size(); ++k) {
    auto idx = t.unflat(k);
    const int a = idx[slot];
    Jet s;
    for (int b = 0; b < dim(); ++b) {
      idx[slot] = b;
      Jet term = ginv_(a, b) * t[t.flat(idx)];
      if (b == 0)
        s = term;
      else
        s += term;
    }
    r[k] = s;
  }
  return r;
}

JetTensor LocalGeometry::lower(const JetTensor& t, int slot) const {
  if (t.valence(slot) != Valence::Up) throw ShapeMismatch("lower: slot is not contravariant");
  auto val = t.valence();
  val[slot] = Valence::Down;
  JetTensor r(t.dim(), val);
  for (std::size_t k = 0; k < t.size(); ++k) {
    auto idx = t.unflat(k);
    const int a = idx[slot];
    Jet s;
    for (int b = 0; b < dim(); ++b) {
      idx[slot] = b;
      Jet term = g_(a, b) * t[t.flat(idx)];
      if (b == 0)
        s = term;
      else
        s += term;
    }
    r[k] = s;
  }
  return r;
}

JetTensor LocalGeometry::trace(const JetTensor& t, int a, int b) const {
  if (a >= b) throw ShapeMismatch("trace: slots must satisfy a < b");
  const int n = dim();
  std::vector<Valence> val;
  for (int s = 0; s < t.rank(); ++s)
    if (s != a && s != b) val.push_back(t.valence(s));
  JetTensor r(n, val);
  const Valence va = t.valence(a), vb = t.valence(b);
  const JetTensor* metric = nullptr;
  if (va == Valence::Down && vb == Valence::Down) metric = &ginv_;
  if (va == Valence::Up && vb == Valence::Up) metric = &g_;
  std::vector<int> full(t.rank());
  for (std::size_t k = 0; k < r.size(); ++k) {
    const auto ridx = r.unflat(k);
    for (int s = 0, q = 0; s < t.rank(); ++s)
      if (s != a && s != b) full[s] = ridx[q++];
    Jet acc;
    bool first = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (!metric && i != j) continue;
        full[a] = i;
        full[b] = j;
        Jet term = metric ? (*metric)(i, j) * t[t.flat(full)] : t[t.flat(full)];
        if (first) {
          acc = term;
          first = false;
        } else {
          acc += term;
        }
      }
    r[k] = acc;
  }
  return r;
}

Jet LocalGeometry::dot(const JetTensor& a, const JetTensor& b) const {
  if (a.rank() != 1 || b.rank() != 1 || a.valence(0) != Valence::Down ||
      b.valence(0) != Valence::Down)
    throw ShapeMismatch("dot expects two (0,1) fields");
  Jet s = Jet::constant(space(), kMaxOrder, 0.0);
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) s += ginv_(i, j) * a[i] * b[j];
  return s;
}

TensorValue LocalGeometry::weyl() const {
  const int n = dim();
  TensorValue w(n, downs(4), 0.0);
  if (n < 3) return w;
  const TensorValue g = value(g_), rm = value(riemann_), ric = value(ricci_);
  const double R = scalar_.value();
  const double cs = -R / ((n - 1.0) * (n - 2.0)), cr = 1.0 / (n - 2.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double sc = cs * (g(i, k) * g(j, l) - g(i, l) * g(j, k));
          const double rc = cr * (ric(i, k) * g(j, l) - ric(i, l) * g(j, k) +
                                  ric(j, l) * g(i, k) - ric(j, k) * g(i, l));
          w(i, j, k, l) = rm(i, j, k, l) - sc - rc;
        }
  return w;
}

CurvatureBundle curvature(const LocalGeometry& lg) {
  const int n = lg.dim();
  CurvatureBundle b;
  b.metric = value(lg.g());
  b.inverse_metric = value(lg.ginv());
  b.christoffel = value(lg.gamma());
  b.riemann = value(lg.riemann());
  b.ricci = value(lg.ricci());
  b.scalar = lg.scalar().value();
  b.weyl = lg.weyl();
  b.ric_sq = TensorValue(n, downs(2), 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          b.ric_sq(i, k) += b.ricci(i, j) * b.inverse_metric(j, l) * b.ricci(l, k);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) b.ric_norm_sq += b.inverse_metric(i, k) * b.ric_sq(i, k);
  return b;
}

TensorValue christoffel(const ChartMetric& m, std::span<const double> p, DiffMode mode) {
  return value(LocalGeometry(m, p, mode).gamma());
}

CurvatureBundle curvature(const ChartMetric& m, std::span<const double> p, DiffMode mode) {
  return curvature(LocalGeometry(m, p, mode));
}

TensorValue covariant_derivative(const ChartMetric& m, const ExprTensor& field,
                                 std::span<const double> p, DiffMode mode) {
  LocalGeometry lg(m, p, mode);
  return value(lg.nabla(lg.expand(field)));
}

TensorValue hessian(const ChartMetric& m, const Expr& f, std::span<const double> p,
                    DiffMode mode) {
  LocalGeometry lg(m, p, mode);
  const JetTensor fj = JetTensor::scalar(m.dim(), lg.expand(f));
  return value(lg.nabla(lg.nabla(fj)));
}

double laplacian_scalar(const ChartMetric& m, const Expr& f, std::span<const double> p,
                        DiffMode mode) {
  LocalGeometry lg(m, p, mode);
  const JetTensor fj = JetTensor::scalar(m.dim(), lg.expand(f));
  return lg.trace(lg.nabla(lg.nabla(fj)), 0, 1)[0].value();
}

TensorValue laplacian_tensor2(const ChartMetric& m, const ExprTensor& t,
                              std::span<const double> p, DiffMode mode) {
  if (t.rank() != 2) throw ShapeMismatch("laplacian_tensor2 expects a rank-2 field");
  LocalGeometry lg(m, p, mode);
  return value(lg.trace(lg.nabla(lg.nabla(lg.expand(t))), 0, 1));
}

TensorValue divergence_ric(const ChartMetric& m, std::span<const double> p, DiffMode mode) {
  LocalGeometry lg(m, p, mode);
  return value(lg.trace(lg.nabla(lg.ricci()), 0, 2));
}

double frame_norm(const TensorValue& t, const TensorValue& g) {
  const int n = g.dim();
  const std::vector<double> L = cholesky(g);
  // Linv rows give the orthonormal frame e_a = sum_i Linv(a,i) d_i.
  std::vector<double> Linv(static_cast<std::size_t>(n * n), 0.0);
  for (int c = 0; c < n; ++c)
    for (int i = 0; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (int k = c; k < i; ++k) s -= L[i * n + k] * Linv[k * n + c];
      Linv[i * n + c] = s / L[i * n + i];
    }
  TensorValue cur = t;
  for (int slot = 0; slot < t.rank(); ++slot) {
    TensorValue next(n, t.valence(), 0.0);
    for (std::size_t k = 0; k < cur.size(); ++k) {
      auto idx = cur.unflat(k);
      const int a = idx[slot];
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        idx[slot] = i;
        const double m = t.valence(slot) == Valence::Down ? Linv[a * n + i] : L[i * n + a];
        s += m * cur[cur.flat(idx)];
      }
      next[k] = s;
    }
    cur = std::move(next);
  }
  return max_abs(cur);
}

}  // namespace rw
