#include "rw/ode.hpp"

#include <algorithm>
#include <cmath>

#include "rw/errors.hpp"

namespace rw {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Fifth-order minus embedded fourth-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

double ode_integrate(const OdeRhs& f, std::vector<double>& y, double t0, double t1,
                     const OdeConfig& cfg, double& step, const OdeMonitor& monitor) {
  const std::size_t n = y.size();
  if (t1 == t0) return t0;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double h = step > 0 ? step : cfg.initial_step;
  h = std::min(h, cfg.max_step);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);
  double t = t0;
  f(t, y, k1);
  for (long it = 0; it < cfg.max_steps; ++it) {
    const double remaining = (t1 - t) * dir;
    if (remaining <= 0) break;
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    const double s = dir * h;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + s * a21 * k1[i];
    f(t + c2 * s, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + s * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * s, tmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + s * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * s, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + s * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * s, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + s * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + s, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + s * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(t + s, ynew, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = s * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
      const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (!std::isfinite(err)) err = 1e10;
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err <= 1.0) {
      t = last ? t1 : t + s;
      y.swap(ynew);
      k1.swap(k7);  // first-same-as-last
      if (!last) step = h;
      h = std::min(h * factor, cfg.max_step);
      if (monitor && !monitor(t, y)) return t;
      if (last) return t;
    } else {
      h *= factor;
      if (h < 1e-15 * std::max(1.0, std::abs(t))) throw Error("ODE step size underflow");
    }
  }
  if ((t1 - t) * dir > 0) throw Error("ODE integration exceeded its step budget");
  return t;
}

}  // namespace rw
