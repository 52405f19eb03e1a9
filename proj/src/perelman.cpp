#include "rw/perelman.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

#include "rw/errors.hpp"
#include "rw/kernels/kernels.hpp"

namespace rw {

PeriodicGrid::PeriodicGrid(int n, int m, std::vector<double> sides)
    : n_(n), m_(m), sides_(std::move(sides)) {
  if (n < 1 || n > 4) throw DimensionMismatch("periodic grid dimension must be in [1, 4]");
  if (m < 8 || m % 2 != 0) throw Error("periodic grid needs an even m >= 8");
  if (static_cast<int>(sides_.size()) != n)
    throw ShapeMismatch("periodic grid needs one side length per axis");
  size_ = 1;
  volume_ = 1.0;
  for (double L : sides_) {
    if (!(L > 0.0) || !std::isfinite(L)) throw Error("periodic grid sides must be positive");
    size_ *= static_cast<std::size_t>(m);
    volume_ *= L;
  }
  weight_ = volume_ / static_cast<double>(size_);
}

double PeriodicGrid::coordinate(std::size_t node, int axis) const {
  std::size_t stride = 1;
  for (int a = n_ - 1; a > axis; --a) stride *= static_cast<std::size_t>(m_);
  const auto j = static_cast<double>((node / stride) % static_cast<std::size_t>(m_));
  return j * sides_[axis] / m_;
}

DiscreteField constant_field(const PeriodicGrid& g, double v) {
  return DiscreteField{std::vector<double>(g.size(), v)};
}

DiscreteField sample_field(const PeriodicGrid& g, const Expr& e) {
  if (e.max_var() >= g.dim()) throw DimensionMismatch("field expression uses too many variables");
  DiscreteField out{std::vector<double>(g.size())};
  std::vector<double> x(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int a = 0; a < g.dim(); ++a) x[a] = g.coordinate(i, a);
    out[i] = e.eval(x);
    if (!std::isfinite(out[i])) throw Error("field expression is not finite at a grid node");
  }
  return out;
}

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void require_shape(const PeriodicGrid& g, const DiscreteField& u) {
  if (u.size() != g.size()) throw ShapeMismatch("field size does not match the grid");
}

// r2c/c2r transforms of one grid plus the Fourier multipliers used here.
// Complex layout: the last axis keeps m/2 + 1 frequencies.
class Spectral {
 public:
  explicit Spectral(const PeriodicGrid& g) : g_(g) {
    const int n = g.dim(), m = g.points_per_axis();
    half_ = static_cast<std::size_t>(m / 2 + 1);
    ncomplex_ = g.size() / static_cast<std::size_t>(m) * half_;
    real_ = static_cast<double*>(fftw_malloc(sizeof(double) * g.size()));
    spec_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ncomplex_));
    std::vector<int> dims(n, m);
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fwd_ = fftw_plan_dft_r2c(n, dims.data(), real_, spec_, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r(n, dims.data(), spec_, real_, FFTW_ESTIMATE);
    }
    // Signed wavenumbers per axis for every complex slot.
    xi_.assign(static_cast<std::size_t>(n) * ncomplex_, 0.0);
    nyquist_.assign(static_cast<std::size_t>(n) * ncomplex_, 0);
    xi2_.assign(ncomplex_, 0.0);
    for (std::size_t k = 0; k < ncomplex_; ++k) {
      std::size_t rest = k;
      for (int a = n - 1; a >= 0; --a) {
        const std::size_t len = a == n - 1 ? half_ : static_cast<std::size_t>(m);
        const int j = static_cast<int>(rest % len);
        rest /= len;
        const int s = j <= m / 2 ? j : j - m;
        const double xi = 2.0 * std::numbers::pi * s / g.sides()[a];
        xi_[a * ncomplex_ + k] = xi;
        nyquist_[a * ncomplex_ + k] = j == m / 2;
        xi2_[k] += xi * xi;
      }
    }
  }
  ~Spectral() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  std::size_t ncomplex() const noexcept { return ncomplex_; }
  const std::vector<double>& xi2() const noexcept { return xi2_; }

  // u -> inverse transform of mult * transform(u); mult already holds 1/N.
  DiscreteField apply(const DiscreteField& u, const std::vector<double>& mult) {
    forward(u);
    kernels::active().scale_complex(reinterpret_cast<double*>(spec_), mult.data(), ncomplex_);
    return backward();
  }

  DiscreteField derivative(const DiscreteField& u, int axis) {
    forward(u);
    const double inv = 1.0 / static_cast<double>(g_.size());
    for (std::size_t k = 0; k < ncomplex_; ++k) {
      const double xi = nyquist_[axis * ncomplex_ + k] ? 0.0 : xi_[axis * ncomplex_ + k] * inv;
      const double re = spec_[k][0], im = spec_[k][1];
      spec_[k][0] = -xi * im;
      spec_[k][1] = xi * re;
    }
    return backward();
  }

  std::vector<double> multiplier(double (*fn)(double, double), double param) const {
    std::vector<double> out(ncomplex_);
    const double inv = 1.0 / static_cast<double>(g_.size());
    for (std::size_t k = 0; k < ncomplex_; ++k) out[k] = fn(xi2_[k], param) * inv;
    return out;
  }

 private:
  void forward(const DiscreteField& u) {
    std::copy(u.values.begin(), u.values.end(), real_);
    fftw_execute(fwd_);
  }
  DiscreteField backward() {
    fftw_execute(bwd_);
    return DiscreteField{std::vector<double>(real_, real_ + g_.size())};
  }

  const PeriodicGrid& g_;
  std::size_t half_ = 0, ncomplex_ = 0;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan fwd_ = nullptr, bwd_ = nullptr;
  std::vector<double> xi_, xi2_;
  std::vector<char> nyquist_;
};

double laplace_symbol(double xi2, double) { return -xi2; }
double precond_symbol(double xi2, double shift) { return 1.0 / (8.0 * xi2 + shift); }

// x^2 log x^2 and x log x^2 with their continuous extensions at 0.
double x2logx2(double x) { return x == 0.0 ? 0.0 : x * x * std::log(x * x); }
double xlogx2(double x) { return x == 0.0 ? 0.0 : x * std::log(x * x); }

double wsum(const PeriodicGrid& g, const std::vector<double>& v) {
  return g.weight() * kernels::active().sum(v.data(), v.size());
}

double wdot(const PeriodicGrid& g, const DiscreteField& a, const DiscreteField& b) {
  return g.weight() * kernels::active().dot(a.values.data(), b.values.data(), a.size());
}

void require_normalized(const PeriodicGrid& g, const DiscreteField& u) {
  const double norm = wdot(g, u, u);
  if (!(std::abs(norm - 1.0) <= 1e-12))
    throw NotNormalized("field is not normalized: int u^2 = " + std::to_string(norm));
}

void normalize(const PeriodicGrid& g, DiscreteField& u) {
  const double s = 1.0 / std::sqrt(wdot(g, u, u));
  for (double& x : u.values) x *= s;
}

// F given u and Delta u.
double functional_with(const PeriodicGrid& g, const DiscreteField& u, const DiscreteField& lap,
                       double mu, const DiscreteField& R) {
  const double c = 2.0 * mu / g.dim();
  std::vector<double> terms(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    terms[i] = R[i] * u[i] * u[i] - 4.0 * u[i] * lap[i] - c * x2logx2(u[i]);
  return wsum(g, terms);
}

ElState el_with(const PeriodicGrid& g, const DiscreteField& u, const DiscreteField& lap,
                double mu, const DiscreteField& R) {
  const double k = mu / g.dim();
  std::vector<double> base(u.size());
  // r = base - C u with base = Delta u - R u/4 + (mu/n) u log u.
  for (std::size_t i = 0; i < u.size(); ++i)
    base[i] = lap[i] - 0.25 * R[i] * u[i] + 0.5 * k * xlogx2(u[i]);
  const DiscreteField b{std::move(base)};
  ElState s;
  s.constant = wdot(g, b, u) / wdot(g, u, u);
  for (std::size_t i = 0; i < u.size(); ++i)
    s.residual = std::max(s.residual, std::abs(b[i] - s.constant * u[i]));
  return s;
}

}  // namespace

DiscreteField discrete_laplacian(const PeriodicGrid& g, const DiscreteField& u) {
  require_shape(g, u);
  Spectral sp(g);
  return sp.apply(u, sp.multiplier(laplace_symbol, 0.0));
}

DiscreteField discrete_gradient(const PeriodicGrid& g, const DiscreteField& u, int axis) {
  require_shape(g, u);
  if (axis < 0 || axis >= g.dim()) throw DimensionMismatch("gradient axis out of range");
  Spectral sp(g);
  return sp.derivative(u, axis);
}

double integrate(const PeriodicGrid& g, const DiscreteField& v) {
  require_shape(g, v);
  return wsum(g, v.values);
}

double entropy(const PeriodicGrid& g, const DiscreteField& u) {
  require_shape(g, u);
  std::vector<double> t(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) t[i] = x2logx2(u[i]);
  return wsum(g, t);
}

double functional_eval(const PeriodicGrid& g, const DiscreteField& u, double mu,
                       const DiscreteField& R) {
  require_shape(g, u);
  require_shape(g, R);
  require_normalized(g, u);
  return functional_with(g, u, discrete_laplacian(g, u), mu, R);
}

double grid_lower_bound(const PeriodicGrid& g, double mu, const DiscreteField& R) {
  require_shape(g, R);
  const double rmin = *std::min_element(R.values.begin(), R.values.end());
  const double nodes_log = g.dim() * std::log(static_cast<double>(g.points_per_axis()));
  return rmin - 2.0 * mu / g.dim() * (nodes_log - std::log(g.volume()));
}

ElState euler_lagrange(const PeriodicGrid& g, const DiscreteField& u, double mu,
                       const DiscreteField& R) {
  require_shape(g, u);
  require_shape(g, R);
  return el_with(g, u, discrete_laplacian(g, u), mu, R);
}

MinimizeResult minimize(const PeriodicGrid& g, double mu, const DiscreteField& R,
                        const MinimizeConfig& cfg) {
  if (!(mu > 0.0)) throw NegativeMu("minimization needs mu > 0");
  require_shape(g, R);
  if (!(cfg.precond_shift > 0.0)) throw Error("preconditioner shift must be positive");
  Spectral sp(g);
  const auto lap_mult = sp.multiplier(laplace_symbol, 0.0);
  const auto pre_mult = sp.multiplier(precond_symbol, cfg.precond_shift);
  const double k = mu / g.dim();
  const double eps = std::numeric_limits<double>::epsilon();
  const double jensen_floor = -std::log(g.volume());

  MinimizeResult res;
  res.lower_bound = grid_lower_bound(g, mu, R);

  DiscreteField u;
  if (cfg.initial) {
    require_shape(g, *cfg.initial);
    u = *cfg.initial;
    for (double& x : u.values) x = std::abs(x);
  } else if (cfg.init == InitKind::Random) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    u = constant_field(g, 1.0);
    for (double& x : u.values) x = 1.0 + cfg.init_amplitude * d(rng);
  } else {
    u = constant_field(g, 1.0);
  }
  if (!(wdot(g, u, u) > 0.0)) throw NonPositiveField("initial field vanishes identically");
  normalize(g, u);

  auto check_invariants = [&](const DiscreteField& v, double F) {
    const double h = entropy(g, v);
    if (h < jensen_floor - 1e-12 * (1.0 + std::abs(jensen_floor))) res.jensen_holds = false;
    if (F < res.lower_bound - 1e-12 * (1.0 + std::abs(res.lower_bound)))
      res.lower_bound_holds = false;
  };

  DiscreteField lap = sp.apply(u, lap_mult);
  double F = functional_with(g, u, lap, mu, R);
  check_invariants(u, F);
  ElState el = el_with(g, u, lap, mu, R);

  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    if (cfg.keep_history) {
      res.sigma_history.push_back(F);
      res.residual_history.push_back(el.residual);
    }
    if (el.residual <= cfg.tolerance) break;

    DiscreteField grad{std::vector<double>(u.size())};
    for (std::size_t i = 0; i < u.size(); ++i)
      grad[i] = 2.0 * R[i] * u[i] - 8.0 * lap[i] - 4.0 * k * (xlogx2(u[i]) + u[i]);
    const DiscreteField pg = sp.apply(grad, pre_mult);
    const DiscreteField pu = sp.apply(u, pre_mult);
    // Tangent direction in the preconditioned metric: <d, u> = 0.
    const double beta = wdot(g, pg, u) / wdot(g, pu, u);
    DiscreteField dir = pg;
    kernels::active().axpy(-beta, pu.values.data(), dir.values.data(), dir.size());
    const double slope = wdot(g, grad, dir);
    const double resolution = 16.0 * eps * std::max(1.0, std::abs(F));
    // Below the resolution of F, sufficient decrease is undecidable; steps
    // are then accepted when F stays within resolution and the EL residual drops.
    const bool armijo_regime = slope > resolution;

    double alpha = 1.0;
    bool accepted = false;
    DiscreteField trial, tlap;
    double Ft = F;
    ElState elt;
    while (alpha >= cfg.min_step) {
      trial = u;
      kernels::active().axpy(-alpha, dir.values.data(), trial.values.data(), trial.size());
      for (double& x : trial.values) x = std::abs(x);
      normalize(g, trial);
      tlap = sp.apply(trial, lap_mult);
      Ft = functional_with(g, trial, tlap, mu, R);
      if (armijo_regime) {
        accepted = Ft <= F - cfg.armijo * alpha * slope;
        if (accepted) elt = el_with(g, trial, tlap, mu, R);
      } else if (Ft <= F + resolution) {
        elt = el_with(g, trial, tlap, mu, R);
        accepted = elt.residual < el.residual;
      }
      if (accepted) break;
      alpha *= 0.5;
    }
    if (!accepted) break;
    if (Ft > F + resolution) res.monotone = false;
    u = std::move(trial);
    lap = std::move(tlap);
    F = Ft;
    check_invariants(u, F);
    el = elt;
  }

  res.iterations = it;
  res.sigma = F;
  res.el_constant = el.constant;
  res.el_residual = el.residual;
  res.u_min = *std::min_element(u.values.begin(), u.values.end());
  res.u_max = *std::max_element(u.values.begin(), u.values.end());
  res.converged = el.residual <= cfg.tolerance && res.u_min > 0.0;
  res.u = std::move(u);
  return res;
}

RecoveredExpression recover_f_check(const PeriodicGrid& g, const MinimizeResult& r, double mu,
                                    const DiscreteField& R) {
  require_shape(g, r.u);
  require_shape(g, R);
  for (double x : r.u.values)
    if (!(x > 0.0)) throw NonPositiveField("u must be positive to recover f = -2 log u");
  Spectral sp(g);
  RecoveredExpression out;
  out.f.values.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out.f[i] = -2.0 * std::log(r.u[i]);
  const DiscreteField lapf = sp.apply(out.f, sp.multiplier(laplace_symbol, 0.0));
  std::vector<double> grad2(g.size(), 0.0);
  for (int a = 0; a < g.dim(); ++a) {
    const DiscreteField d = sp.derivative(out.f, a);
    for (std::size_t i = 0; i < g.size(); ++i) grad2[i] += d[i] * d[i];
  }
  const double c = 2.0 * mu / g.dim();
  out.expression.values.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    out.expression[i] = R[i] + 2.0 * lapf[i] - grad2[i] + c * out.f[i];
  const auto& e = out.expression.values;
  const double n = static_cast<double>(e.size());
  out.expr_mean = kernels::active().sum(e.data(), e.size()) / n;
  std::vector<double> dev(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) dev[i] = (e[i] - out.expr_mean) * (e[i] - out.expr_mean);
  out.expr_std = std::sqrt(kernels::active().sum(dev.data(), dev.size()) / n);
  out.minus_4c = -4.0 * el_with(g, r.u, sp.apply(r.u, sp.multiplier(laplace_symbol, 0.0)), mu, R)
                            .constant;
  return out;
}

}  // namespace rw
