#pragma once

// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y).

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace rw {

struct OdeConfig {
  double rtol = 1e-12;
  double atol = 1e-12;
  double initial_step = 1e-3;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000;
};

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;
// Called after every accepted step; returning false stops the integration.
using OdeMonitor = std::function<bool(double t, std::span<const double> y)>;

// Advances y from t0 to t1 (either direction) and returns the time reached,
// which is t1 unless the monitor stopped early. `step` carries the step size
// between calls (0 means cfg.initial_step). Raises Error on step underflow.
double ode_integrate(const OdeRhs& f, std::vector<double>& y, double t0, double t1,
                     const OdeConfig& cfg, double& step, const OdeMonitor& monitor = {});

}  // namespace rw
