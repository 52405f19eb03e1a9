#include "rw/geodesic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "rw/errors.hpp"
#include "rw/parallel.hpp"

namespace rw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kConjugateThreshold = 1e-10;

// Flat buffers for one point: g[i*n+j], gamma[(k*n+i)*n+j], riem[((i*n+j)*n+l)*n+m].
struct RawCurvature {
  int n = 0;
  std::array<double, kMaxDim * kMaxDim> g{};
  std::array<double, kMaxDim * kMaxDim * kMaxDim> gamma{};
  std::array<double, kMaxDim * kMaxDim * kMaxDim * kMaxDim> riem{};
};

void raw_curvature(const ChartMetric& m, std::span<const double> p, RawCurvature& out) {
  const int n = m.dim();
  out.n = n;
  const JetTensor jg = expand(m.components(), p, 2, DiffMode::Jet, m.domain());
  std::array<double, kMaxDim * kMaxDim> ginv{};
  std::array<double, kMaxDim * kMaxDim * kMaxDim> dg{};                 // [a][i][j]
  std::array<double, kMaxDim * kMaxDim * kMaxDim * kMaxDim> ddg{};      // [a][b][i][j]
  Eigen::Matrix4d G = Eigen::Matrix4d::Identity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Jet& c = jg(i, j);
      out.g[i * n + j] = c.value();
      G(i, j) = c.value();
      for (int a = 0; a < n; ++a) {
        dg[(a * n + i) * n + j] = c.d(a);
        for (int b = 0; b < n; ++b) ddg[((a * n + b) * n + i) * n + j] = c.d(a, b);
      }
    }
  Eigen::LLT<Eigen::MatrixXd> llt(G.topLeftCorner(n, n));
  if (llt.info() != Eigen::Success) throw NonPositiveDefinite("metric is not positive definite");
  const Eigen::MatrixXd Gi = llt.solve(Eigen::MatrixXd::Identity(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ginv[i * n + j] = Gi(i, j);

  // First-kind symbols and their derivatives.
  auto D = [&](int a, int i, int j) { return dg[(a * n + i) * n + j]; };
  auto DD = [&](int a, int b, int i, int j) { return ddg[((a * n + b) * n + i) * n + j]; };
  std::array<double, kMaxDim * kMaxDim * kMaxDim> first{};  // [s][i][j]
  std::array<double, kMaxDim * kMaxDim * kMaxDim * kMaxDim> dfirst{};  // [a][s][i][j]
  for (int s = 0; s < n; ++s)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        first[(s * n + i) * n + j] = 0.5 * (D(i, s, j) + D(j, s, i) - D(s, i, j));
        for (int a = 0; a < n; ++a)
          dfirst[((a * n + s) * n + i) * n + j] =
              0.5 * (DD(a, i, s, j) + DD(a, j, s, i) - DD(a, s, i, j));
      }
  // d_a g^{ks} = -g^{kp} d_a g_pq g^{qs}
  std::array<double, kMaxDim * kMaxDim * kMaxDim> dginv{};
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < n; ++k)
      for (int s = 0; s < n; ++s) {
        double acc = 0;
        for (int p2 = 0; p2 < n; ++p2)
          for (int q = 0; q < n; ++q) acc -= ginv[k * n + p2] * D(a, p2, q) * ginv[q * n + s];
        dginv[(a * n + k) * n + s] = acc;
      }
  std::array<double, kMaxDim * kMaxDim * kMaxDim * kMaxDim> dgamma{};  // [a][k][i][j]
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0;
        for (int s = 0; s < n; ++s) acc += ginv[k * n + s] * first[(s * n + i) * n + j];
        out.gamma[(k * n + i) * n + j] = acc;
        for (int a = 0; a < n; ++a) {
          double d = 0;
          for (int s = 0; s < n; ++s)
            d += dginv[(a * n + k) * n + s] * first[(s * n + i) * n + j] +
                 ginv[k * n + s] * dfirst[((a * n + s) * n + i) * n + j];
          dgamma[((a * n + k) * n + i) * n + j] = d;
        }
      }
  auto Gm = [&](int k, int i, int j) { return out.gamma[(k * n + i) * n + j]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        for (int mm = 0; mm < n; ++mm) {
          double r = dgamma[((i * n + mm) * n + j) * n + l] - dgamma[((j * n + mm) * n + i) * n + l];
          for (int p2 = 0; p2 < n; ++p2)
            r += Gm(mm, i, p2) * Gm(p2, j, l) - Gm(mm, j, p2) * Gm(p2, i, l);
          out.riem[((i * n + j) * n + l) * n + mm] = r;
        }
}

double gdot(const RawCurvature& c, const double* a, const double* b) {
  const int n = c.n;
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += c.g[i * n + j] * a[i] * b[j];
  return s;
}

double gdot_at(const TensorValue& g, std::span<const double> a, std::span<const double> b) {
  const int n = g.dim();
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += g(i, j) * a[i] * b[j];
  return s;
}

// Orthonormal complement of unit `v` at p, by Gram-Schmidt on coordinate axes.
std::vector<Vec> complement_frame(const TensorValue& g, const Vec& v) {
  const int n = g.dim();
  std::vector<Vec> basis{v};
  std::vector<std::pair<double, int>> order;
  for (int k = 0; k < n; ++k) order.emplace_back(std::abs(v[k]) / std::sqrt(g(k, k)), k);
  // Coordinate axes least aligned with v first.
  std::sort(order.begin(), order.end());
  for (auto [_, k] : order) {
    if (static_cast<int>(basis.size()) == n) break;
    Vec e(n, 0.0);
    e[k] = 1.0;
    for (const Vec& b : basis) {
      const double c = gdot_at(g, e, b);
      for (int i = 0; i < n; ++i) e[i] -= c * b[i];
    }
    const double len = std::sqrt(gdot_at(g, e, e));
    if (len < 1e-6) continue;
    for (double& x : e) x /= len;
    basis.push_back(e);
  }
  if (static_cast<int>(basis.size()) != n) throw Error("could not complete an orthonormal frame");
  return {basis.begin() + 1, basis.end()};
}

// State layout: x, v, E_a, Y_a, V_a (a < frames; Y, V only with jacobi).
struct Layout {
  int n = 0, frames = 0;
  bool jacobi = false;
  std::size_t size() const { return static_cast<std::size_t>(n) * (2 + frames * (jacobi ? 3 : 1)); }
  std::size_t e(int a) const { return static_cast<std::size_t>(n) * (2 + a); }
  std::size_t y(int a) const { return static_cast<std::size_t>(n) * (2 + frames + a); }
  std::size_t w(int a) const { return static_cast<std::size_t>(n) * (2 + 2 * frames + a); }
};

OdeRhs make_rhs(const ChartMetric& m, const Layout& L) {
  return [&m, L](double, std::span<const double> y, std::span<double> dy) {
    const int n = L.n;
    const std::span<const double> x = y.subspan(0, n);
    if (!m.domain().contains(x)) throw OutOfDomain("geodesic left the chart domain");
    RawCurvature c;
    raw_curvature(m, x, c);
    const double* v = y.data() + n;
    auto G = [&](int k, int i, int j) { return c.gamma[(k * n + i) * n + j]; };
    // Covariant transport term: -Gamma^k_ij v^i w^j.
    auto transport = [&](const double* w, double* out) {
      for (int k = 0; k < n; ++k) {
        double s = 0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s += G(k, i, j) * v[i] * w[j];
        out[k] = -s;
      }
    };
    for (int k = 0; k < n; ++k) dy[k] = v[k];
    transport(v, dy.data() + n);
    for (int a = 0; a < L.frames; ++a) transport(y.data() + L.e(a), dy.data() + L.e(a));
    if (!L.jacobi) return;
    for (int a = 0; a < L.frames; ++a) {
      const double* Y = y.data() + L.y(a);
      const double* V = y.data() + L.w(a);
      double* dY = dy.data() + L.y(a);
      double* dV = dy.data() + L.w(a);
      transport(Y, dY);
      for (int k = 0; k < n; ++k) dY[k] += V[k];
      transport(V, dV);
      for (int mm = 0; mm < n; ++mm) {
        double s = 0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) s += c.riem[((i * n + j) * n + l) * n + mm] * Y[i] * v[j] * v[l];
        dV[mm] -= s;
      }
    }
  };
}

Vec initial_state(const ChartMetric& m, std::span<const double> p, const Vec& v, const Layout& L) {
  Vec y(L.size(), 0.0);
  std::copy(p.begin(), p.end(), y.begin());
  std::copy(v.begin(), v.end(), y.begin() + L.n);
  if (L.frames > 0) {
    const auto frame = complement_frame(m.metric_at(p), v);
    for (int a = 0; a < L.frames; ++a) {
      std::copy(frame[a].begin(), frame[a].end(), y.begin() + L.e(a));
      // Y(0) = 0, Y'(0) = E: V(0) = E.
      if (L.jacobi) std::copy(frame[a].begin(), frame[a].end(), y.begin() + L.w(a));
    }
  }
  return y;
}

// det <Y_a, E_b>, M' = <V_a, E_b>, and d log |det M| = tr(M^{-1} M').
struct DetInfo {
  double det = 0.0, dlog = 0.0;
};

DetInfo jacobi_det(const ChartMetric& m, const Layout& L, const Vec& y) {
  RawCurvature c;
  c.n = L.n;
  const TensorValue g = m.metric_at(std::span<const double>(y.data(), L.n));
  for (int i = 0; i < L.n; ++i)
    for (int j = 0; j < L.n; ++j) c.g[i * L.n + j] = g(i, j);
  const int k = L.frames;
  Eigen::MatrixXd M(k, k), Md(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      M(a, b) = gdot(c, y.data() + L.y(a), y.data() + L.e(b));
      Md(a, b) = gdot(c, y.data() + L.w(a), y.data() + L.e(b));
    }
  DetInfo d;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  d.det = lu.determinant();
  if (d.det != 0.0) d.dlog = lu.solve(Md).trace();
  return d;
}

// Arclength at which the trajectory from (t0, y0) leaves the domain, by
// bisection on single sub-integrations of at most `span`.
double exit_time(const OdeRhs& f, const ChartMetric& m, const Layout& L, const Vec& y0, double t0,
                 double span, const GeodesicConfig& cfg) {
  auto inside_at = [&](double tau) {
    Vec y = y0;
    double h = 0.0;
    try {
      ode_integrate(f, y, t0, tau, cfg.ode, h);
    } catch (const OutOfDomain&) {
      return false;
    }
    return m.domain().contains(std::span<const double>(y.data(), L.n));
  };
  double a = t0, b = t0 + std::max(span, 1e-6);
  while (inside_at(b)) {
    a = b;
    b = t0 + 2 * (b - t0);
  }
  while (b - a > 1e-12 * std::max(1.0, b)) {
    const double mid = 0.5 * (a + b);
    (inside_at(mid) ? a : b) = mid;
  }
  return a;
}

// Integrates through the increasing times, returning the state at each;
// `stop` may end the run after an accepted step by returning true.
std::vector<Vec> run(const ChartMetric& m, const Layout& L, Vec y, std::span<const double> times,
                     const GeodesicConfig& cfg,
                     const std::function<bool(double, const Vec&)>& stop = {}) {
  const OdeRhs f = make_rhs(m, L);
  std::vector<Vec> out;
  out.reserve(times.size());
  double t = 0.0, step = 0.0;
  double last_good = 0.0;
  Vec good = y;
  for (double target : times) {
    if (target < t) throw Error("integration times must be increasing");
    try {
      const double reached = ode_integrate(
          f, y, t, target, cfg.ode, step, [&](double tt, std::span<const double>) {
            last_good = tt;
            good = y;
            return !(stop && stop(tt, y));
          });
      t = reached;
      if (reached != target) return out;
    } catch (const OutOfDomain&) {
      throw LeftDomain("geodesic left the chart domain", exit_time(f, m, L, good, last_good, step, cfg));
    }
    out.push_back(y);
  }
  return out;
}

GeodesicState state_of(const Layout& L, const Vec& y, double t) {
  GeodesicState s;
  s.position.assign(y.begin(), y.begin() + L.n);
  s.velocity.assign(y.begin() + L.n, y.begin() + 2 * L.n);
  s.t = t;
  return s;
}

}  // namespace

PointCurvature point_curvature(const ChartMetric& m, std::span<const double> p) {
  m.require_inside(p);
  RawCurvature c;
  raw_curvature(m, p, c);
  const int n = m.dim();
  PointCurvature out{TensorValue(n, {Valence::Up, Valence::Down, Valence::Down}),
                     TensorValue(n, {Valence::Down, Valence::Down, Valence::Down, Valence::Up}),
                     TensorValue(n, downs(2))};
  std::copy(c.gamma.begin(), c.gamma.begin() + n * n * n, out.gamma.data().begin());
  std::copy(c.riem.begin(), c.riem.begin() + n * n * n * n, out.riemann.data().begin());
  std::copy(c.g.begin(), c.g.begin() + n * n, out.metric.data().begin());
  return out;
}

Vec unit_vector(const ChartMetric& m, std::span<const double> p, std::span<const double> dir) {
  if (static_cast<int>(dir.size()) != m.dim())
    throw DimensionMismatch("direction has the wrong number of components");
  const TensorValue g = m.metric_at(p);
  const double len = std::sqrt(gdot_at(g, dir, dir));
  if (!(len > 0.0) || !std::isfinite(len)) throw Error("direction must be a nonzero vector");
  Vec v(dir.begin(), dir.end());
  for (double& x : v) x /= len;
  return v;
}

std::vector<GeodesicState> integrate_geodesic(const ChartMetric& m, std::span<const double> p,
                                              std::span<const double> theta, double L,
                                              int steps, const GeodesicConfig& cfg) {
  m.require_inside(p);
  if (!(L >= 0.0) || steps < 1) throw Error("geodesic length must be >= 0 with steps >= 1");
  const Layout lay{m.dim(), 0, false};
  const Vec v = unit_vector(m, p, theta);
  Vec times(steps + 1);
  for (int k = 0; k <= steps; ++k) times[k] = L * k / steps;
  const auto ys = run(m, lay, initial_state(m, p, v, lay), times, cfg);
  std::vector<GeodesicState> out;
  for (std::size_t k = 0; k < ys.size(); ++k) out.push_back(state_of(lay, ys[k], times[k]));
  return out;
}

std::vector<JacobiSample> jacobi_along(const ChartMetric& m, std::span<const double> p,
                                       std::span<const double> theta, std::span<const double> radii,
                                       const GeodesicConfig& cfg) {
  m.require_inside(p);
  const int n = m.dim();
  if (n < 2) throw DimensionMismatch("Jacobi fields need dimension >= 2");
  for (std::size_t k = 0; k < radii.size(); ++k)
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1])))
      throw Error("radii must be positive and strictly increasing");
  const Layout lay{n, n - 1, true};
  const Vec v = unit_vector(m, p, theta);
  const Vec y0 = initial_state(m, p, v, lay);
  const OdeRhs f = make_rhs(m, lay);

  auto scaled_det = [&](double t, const Vec& y) {
    return jacobi_det(m, lay, y).det / std::pow(t, n - 1);
  };
  double prev_t = 0.0;
  Vec prev_y = y0;
  std::optional<double> hit;
  auto stop = [&](double t, const Vec& y) {
    if (t > 0.0 && scaled_det(t, y) <= kConjugateThreshold) {
      hit = t;
      return true;
    }
    prev_t = t;
    prev_y = y;
    return false;
  };
  const auto ys = run(m, lay, y0, radii, cfg, stop);
  if (hit) {
    // Bisect between the last good step and the flagged one.
    double a = prev_t, b = *hit;
    for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, b); ++it) {
      const double mid = 0.5 * (a + b);
      Vec y = prev_y;
      double step = 0.0;
      if (mid > prev_t) ode_integrate(f, y, prev_t, mid, cfg.ode, step);
      if (scaled_det(mid, y) <= kConjugateThreshold) b = mid;
      else a = mid;
    }
    throw ConjugatePoint("Jacobi determinant vanishes: conjugate point", 0.5 * (a + b));
  }

  std::vector<JacobiSample> out;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const Vec& y = ys[k];
    JacobiSample s;
    s.r = radii[k];
    const DetInfo d = jacobi_det(m, lay, y);
    s.J = std::abs(d.det);
    s.dlogJ = d.dlog;
    const TensorValue g = m.metric_at(std::span<const double>(y.data(), n));
    const std::span<const double> vel(y.data() + n, n);
    s.speed_error = std::abs(std::sqrt(gdot_at(g, vel, vel)) - 1.0);
    s.bundle.state = state_of(lay, y, radii[k]);
    for (int a = 0; a < n - 1; ++a) {
      const std::span<const double> ea(y.data() + lay.e(a), n);
      s.frame_error = std::max(s.frame_error, std::abs(gdot_at(g, ea, vel)));
      for (int b = 0; b < n - 1; ++b) {
        const std::span<const double> eb(y.data() + lay.e(b), n);
        s.frame_error = std::max(s.frame_error, std::abs(gdot_at(g, ea, eb) - (a == b ? 1.0 : 0.0)));
      }
      s.bundle.frame.emplace_back(ea.begin(), ea.end());
      s.bundle.jacobi.emplace_back(y.begin() + lay.y(a), y.begin() + lay.y(a) + n);
      s.bundle.derivative.emplace_back(y.begin() + lay.w(a), y.begin() + lay.w(a) + n);
    }
    out.push_back(std::move(s));
  }
  return out;
}

JacobiSample jacobi_density(const ChartMetric& m, std::span<const double> p,
                            std::span<const double> theta, double r, const GeodesicConfig& cfg) {
  const double radii[] = {r};
  return jacobi_along(m, p, theta, radii, cfg).front();
}

void gauss_legendre(int count, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (count < 1) throw Error("Gauss-Legendre needs at least one node");
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  for (int i = 0; i < count; ++i) {
    // Newton on P_count from the Chebyshev-like initial guess.
    double x = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (count == 1) p0 = 1.0;
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (count == 1) p0 = 1.0;
      dp = count * (x * p1 - p0) / (x * x - 1.0);
    }
    nodes[count - 1 - i] = 0.5 * (a + b) + 0.5 * (b - a) * x;
    weights[count - 1 - i] = (b - a) / ((1.0 - x * x) * dp * dp);
  }
}

DirectionQuadrature direction_quadrature(const ChartMetric& m, std::span<const double> p,
                                         int resolution) {
  const int n = m.dim();
  if (n < 2) throw DimensionMismatch("direction quadrature needs dimension >= 2");
  if (resolution < 2) throw Error("direction quadrature resolution must be >= 2");
  // Unit vectors of R^n with weights: recursive polar construction.
  std::vector<Vec> dirs;
  std::vector<double> w;
  const int ring = 2 * resolution;
  for (int j = 0; j < ring; ++j) {
    const double a = 2.0 * kPi * j / ring;
    dirs.push_back({std::cos(a), std::sin(a)});
    w.push_back(2.0 * kPi / ring);
  }
  std::vector<double> psi, pw;
  gauss_legendre(resolution, 0.0, kPi, psi, pw);
  for (int d = 3; d <= n; ++d) {
    std::vector<Vec> nd;
    std::vector<double> nw;
    for (int i = 0; i < resolution; ++i)
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        Vec c{std::cos(psi[i])};
        for (double x : dirs[k]) c.push_back(std::sin(psi[i]) * x);
        nd.push_back(std::move(c));
        nw.push_back(pw[i] * std::pow(std::sin(psi[i]), d - 2) * w[k]);
      }
    dirs = std::move(nd);
    w = std::move(nw);
  }
  // Frame coordinates to chart components: theta = L^{-T} c with g = L L^T.
  const std::vector<double> Lf = cholesky(m.metric_at(p));
  Eigen::MatrixXd Lm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Lm(i, j) = Lf[i * n + j];
  const Eigen::MatrixXd LinvT = Lm.transpose().triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(n, n));
  DirectionQuadrature q;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) c(i) = dirs[k][i];
    const Eigen::VectorXd t = LinvT * c;
    q.directions.emplace_back(t.data(), t.data() + n);
    q.weights.push_back(w[k]);
  }
  return q;
}

double sphere_area(const ChartMetric& m, std::span<const double> p, double r,
                   const DirectionQuadrature& q, const GeodesicConfig& cfg) {
  std::vector<double> terms(q.directions.size());
  parallel_for(terms.size(), cfg.threads, [&](std::size_t k) {
    terms[k] = q.weights[k] * jacobi_density(m, p, q.directions[k], r, cfg).J;
  });
  double s = 0;
  for (double t : terms) s += t;
  return s;
}

double spherical_mean(const ChartMetric& m, std::span<const double> p, const PointFunction& u,
                      double r, const DirectionQuadrature& q, const GeodesicConfig& cfg) {
  std::vector<double> num(q.directions.size()), den(q.directions.size());
  parallel_for(num.size(), cfg.threads, [&](std::size_t k) {
    const JacobiSample s = jacobi_density(m, p, q.directions[k], r, cfg);
    den[k] = q.weights[k] * s.J;
    num[k] = den[k] * u(s.bundle.state.position);
  });
  double a = 0, b = 0;
  for (std::size_t k = 0; k < num.size(); ++k) {
    a += num[k];
    b += den[k];
  }
  return a / b;
}

double ball_volume(const ChartMetric& m, std::span<const double> p, double r,
                   const DirectionQuadrature& q, int radial_nodes, const GeodesicConfig& cfg) {
  std::vector<double> s, sw;
  gauss_legendre(radial_nodes, 0.0, r, s, sw);
  std::vector<double> terms(q.directions.size());
  parallel_for(terms.size(), cfg.threads, [&](std::size_t k) {
    const auto js = jacobi_along(m, p, q.directions[k], s, cfg);
    double acc = 0;
    for (int i = 0; i < radial_nodes; ++i) acc += sw[i] * js[i].J;
    terms[k] = q.weights[k] * acc;
  });
  double v = 0;
  for (double t : terms) v += t;
  return v;
}

std::vector<GeodiffEntry> geodiff_check(const ChartMetric& m, std::span<const double> p,
                                        std::span<const double> radii,
                                        const DirectionQuadrature& q, const GeodesicConfig& cfg,
                                        std::optional<double> fd_step) {
  const std::size_t nr = radii.size(), nd = q.directions.size();
  std::vector<double> hs(nr);
  std::vector<double> all;
  for (std::size_t i = 0; i < nr; ++i) {
    if (!(radii[i] > 0.0)) throw Error("geodiff radii must be positive");
    hs[i] = fd_step ? *fd_step : std::min(radii[i] / 4, 1e-3);
    if (!(radii[i] - 2 * hs[i] > 0.0)) throw Error("finite-difference step too large for radius");
    for (int o = -2; o <= 2; ++o) all.push_back(radii[i] + o * hs[i]);
  }
  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  auto slot = [&](double r) {
    return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), r) - sorted.begin());
  };
  // J and d log J for every direction and radius.
  std::vector<std::vector<JacobiSample>> samples(nd);
  parallel_for(nd, cfg.threads, [&](std::size_t k) {
    samples[k] = jacobi_along(m, p, q.directions[k], sorted, cfg);
  });
  std::vector<double> S(sorted.size(), 0.0);
  for (std::size_t k = 0; k < nd; ++k)
    for (std::size_t j = 0; j < sorted.size(); ++j) S[j] += q.weights[k] * samples[k][j].J;

  std::vector<GeodiffEntry> out;
  for (std::size_t i = 0; i < nr; ++i) {
    GeodiffEntry e;
    e.r = radii[i];
    const std::size_t c = slot(radii[i]);
    double num = 0;
    for (std::size_t k = 0; k < nd; ++k) num += q.weights[k] * samples[k][c].J * samples[k][c].dlogJ;
    e.dlogS = num / S[c];
    std::array<std::size_t, 5> idx{};
    for (int o = -2; o <= 2; ++o) idx[o + 2] = slot(radii[i] + o * hs[i]);
    for (std::size_t k = 0; k < nd; ++k) {
      e.max_abs = std::max(e.max_abs, std::abs(samples[k][c].dlogJ - e.dlogS));
      std::array<double, 5> f{};
      for (int o = 0; o < 5; ++o) f[o] = std::log(samples[k][idx[o]].J / S[idx[o]]);
      const double d = (-f[4] + 8 * f[3] - 8 * f[1] + f[0]) / (12 * hs[i]);
      e.max_abs_fd = std::max(e.max_abs_fd, std::abs(d));
    }
    out.push_back(e);
  }
  return out;
}

ScalarProfile sine_profile(double L) {
  return {[L](double t) { return std::sin(kPi * t / L); },
          [L](double t) { return kPi / L * std::cos(kPi * t / L); }};
}

double index_form(const ChartMetric& m, std::span<const double> p, std::span<const double> theta,
                  double L, const ScalarProfile& h, int frame_index, int panels,
                  const GeodesicConfig& cfg) {
  m.require_inside(p);
  const int n = m.dim();
  if (!(L > 0.0) || panels < 1) throw Error("index form needs L > 0 and panels >= 1");
  if (frame_index < 0 || frame_index >= n - 1)
    throw DimensionMismatch("frame index must address a normal field");
  if (std::abs(h.value(0.0)) > 1e-12 || std::abs(h.value(L)) > 1e-12)
    throw EndpointNonzero("variation field must vanish at both endpoints");
  constexpr int kNodes = 8;
  std::vector<double> gn, gw, times, weights;
  for (int k = 0; k < panels; ++k) {
    gauss_legendre(kNodes, L * k / panels, L * (k + 1) / panels, gn, gw);
    times.insert(times.end(), gn.begin(), gn.end());
    weights.insert(weights.end(), gw.begin(), gw.end());
  }
  const Layout lay{n, n - 1, false};
  const Vec v0 = unit_vector(m, p, theta);
  const auto ys = run(m, lay, initial_state(m, p, v0, lay), times, cfg);
  double I = 0;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const Vec& y = ys[k];
    RawCurvature c;
    raw_curvature(m, std::span<const double>(y.data(), n), c);
    const double* v = y.data() + n;
    const double* E = y.data() + lay.e(frame_index);
    // R(E, v, E, v) = g_km R_ijl^m E^i v^j v^l E^k
    double K = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          for (int mm = 0; mm < n; ++mm) {
            const double r = c.riem[((i * n + j) * n + l) * n + mm];
            if (r == 0.0) continue;
            double gE = 0;
            for (int kk = 0; kk < n; ++kk) gE += c.g[kk * n + mm] * E[kk];
            K += r * E[i] * v[j] * v[l] * gE;
          }
    const double hv = h.value(times[k]), hd = h.derivative(times[k]);
    I += weights[k] * (hd * hd - hv * hv * K);
  }
  return I;
}

double diameter_bound(const SolitonInstance& s, double c_f) {
  if (!(s.mu > 0.0)) throw NonContracting("diameter bound needs a contracting soliton (mu > 0)");
  if (!(c_f >= 0.0)) throw Error("C_f must be a nonnegative bound on |f|");
  const double n = s.dim();
  return kPi * std::sqrt(n * (n - 1.0 + 2.0 * c_f) / s.mu);
}

double potential_sup(const SolitonInstance& s, const std::vector<std::vector<double>>& points) {
  if (!s.potential) return 0.0;
  double c = 0;
  for (const auto& p : points) c = std::max(c, std::abs(s.potential->eval(p)));
  return c;
}

OsgoodVerdict osgood_certify(const OsgoodCandidate& cand) {
  if (!cand.phi) throw FlagsUnverified("comparison function is missing");
  if (!cand.nonneg_flag || !cand.concave_flag)
    throw FlagsUnverified("comparison function must be flagged nonnegative and concave");
  if (!(cand.delta > 0.0)) throw FlagsUnverified("delta must be positive");
  const double delta = cand.delta;
  auto phi = [&](double t) {
    const double v = cand.phi(t);
    if (!std::isfinite(v)) throw FlagsUnverified("comparison function is not finite on [0, delta)");
    return v;
  };
  auto tol = [](double a) { return 1e-12 * (1.0 + std::abs(a)); };
  // Sampled flags: uniform grid, geometric grid toward 0.
  std::vector<double> grid;
  constexpr int kUniform = 64;
  for (int j = 0; j < kUniform; ++j) grid.push_back(delta * j / kUniform);
  for (int k = 1; k <= 60; ++k) grid.push_back(delta * std::ldexp(1.0, -k));
  std::sort(grid.begin(), grid.end());
  for (double t : grid)
    if (phi(t) < -tol(0.0)) throw FlagsUnverified(cand.name + ": sampled value is negative");
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double a = grid[i], b = grid[j];
      const double mid = phi(0.5 * (a + b)), chord = 0.5 * (phi(a) + phi(b));
      if (mid < chord - tol(chord)) throw FlagsUnverified(cand.name + ": midpoint concavity fails");
    }

  OsgoodVerdict v;
  if (phi(0.0) > tol(0.0)) return v;  // phi(0) > 0: int dt / phi is finite
  // Tail t_k = delta 2^-k restricted to t < 1/2 so that log(1/t) > 0.
  std::vector<double> tail;
  for (int k = 8; k <= 60; ++k) {
    const double t = delta * std::ldexp(1.0, -k);
    if (t < 0.5) tail.push_back(t);
  }
  if (tail.size() < 8) throw FlagsUnverified("delta too large for the sampled tail");
  auto growth = [&](auto ratio) {
    const double first = ratio(tail.front());
    double mx = first;
    for (double t : tail) mx = std::max(mx, ratio(t));
    return std::pair{first == 0.0 ? (mx == 0.0 ? 1.0 : INFINITY) : mx / first, mx};
  };
  constexpr double kBounded = 1.5;
  const auto [g1, c1] = growth([&](double t) { return phi(t) / t; });
  v.tail_growth = g1;
  if (g1 <= kBounded) {
    v.osgood = true;
    v.tier = "linear";
    v.fitted_c = c1;
    return v;
  }
  const auto [g2, c2] = growth([&](double t) { return phi(t) / (t * std::log(1.0 / t)); });
  if (g2 <= kBounded) {
    v.osgood = true;
    v.tier = "log-linear";
    v.fitted_c = c2;
  }
  return v;
}

OdeDemo ode_counterexample_demo(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw Error("epsilon must lie in (0, 1/2)");
  OdeDemo d;
  d.epsilon = epsilon;
  const OdeRhs f = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = 12.0 * std::sqrt(std::abs(y[0]));
  };
  OdeConfig cfg;
  cfg.rtol = 1e-12;
  cfg.atol = 1e-15;
  Vec zero{0.0, 0.0};
  Vec pert{std::pow(epsilon, 4), 4 * std::pow(epsilon, 3)};
  double hz = 0.0, hp = 0.0, tz = 0.0, tp = epsilon;
  for (int k = 0; k <= 10; ++k) {
    const double x = 0.1 * k;
    if (x > tz) tz = ode_integrate(f, zero, tz, x, cfg, hz);
    double pv = NAN;
    if (x >= epsilon) {
      tp = ode_integrate(f, pert, tp, x, cfg, hp);
      pv = pert[0];
    }
    d.table.push_back({x, std::pow(x, 4), zero[0], pv});
  }
  d.zero_f1 = zero[0];
  d.perturbed_f1 = pert[0];

  auto hbar = [&](double start, double (*phi)(double)) {
    const OdeRhs g = [phi](double, std::span<const double> y, std::span<double> dy) {
      dy[0] = phi(std::max(0.0, y[0])) + y[0];
    };
    Vec y{start};
    double h = 0.0;
    ode_integrate(g, y, 0.0, 1.0, cfg, h);
    return y[0];
  };
  for (double s : {0.0, 1e-12, 1e-8, 1e-4})
    d.hbar.push_back({s, hbar(s, [](double t) { return t; }),
                      hbar(s, [](double t) { return 12.0 * std::sqrt(t); })});
  return d;
}

}  // namespace rw
