#pragma once

// Geodesics, parallel frames and Jacobi fields of chart metrics; areas and
// spherical means of geodesic spheres; the index form of variation fields;
// the soliton diameter bound; Osgood certification of comparison functions.
//
// Jacobi fields Y_a(0) = 0, Y_a'(0) = E_a solve D^2 Y + R(Y, g') g' = 0,
// i.e. (D V)^m = -R_ijl^m Y^i v^j v^l with V = D Y. The area density is
// J = |det <Y_a, E_b>|, which equals sqrt(det g(Y_a, Y_b)).

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rw/catalog.hpp"
#include "rw/geometry.hpp"
#include "rw/ode.hpp"

namespace rw {

using Vec = std::vector<double>;

struct GeodesicState {
  Vec position;
  Vec velocity;
  double t = 0.0;
};

struct JacobiBundle {
  GeodesicState state;
  std::vector<Vec> frame;        // E_a, parallel, orthonormal, orthogonal to velocity
  std::vector<Vec> jacobi;       // Y_a
  std::vector<Vec> derivative;   // V_a = D Y_a / dt
};

struct GeodesicConfig {
  OdeConfig ode{};
  int threads = 1;  // direction-level parallelism
};

// Gamma and the (1,3) curvature at p from exact second-order jets of g.
struct PointCurvature {
  TensorValue gamma;    // (k, i, j)
  TensorValue riemann;  // R_ijl^m stored (i, j, l, m)
  TensorValue metric;
};
PointCurvature point_curvature(const ChartMetric& m, std::span<const double> p);

// g-unit vector along `dir`; raises Error for a zero vector.
Vec unit_vector(const ChartMetric& m, std::span<const double> p, std::span<const double> dir);

// States at `steps + 1` equally spaced arclengths on [0, L]. The direction is
// normalized to unit speed. Raises LeftDomain with the exit arclength.
std::vector<GeodesicState> integrate_geodesic(const ChartMetric& m, std::span<const double> p,
                                              std::span<const double> theta, double L,
                                              int steps = 16, const GeodesicConfig& cfg = {});

struct JacobiSample {
  double r = 0.0;
  double J = 0.0;
  double dlogJ = 0.0;  // d/dr log J = tr(M^{-1} M'), M_ab = <Y_a, E_b>
  double frame_error = 0.0;  // max |<E_a, E_b> - delta_ab|, |<E_a, v>|
  double speed_error = 0.0;  // | |v| - 1 |
  JacobiBundle bundle;
};

// Bundles at the increasing radii `radii` (all > 0). Raises ConjugatePoint
// (located by bisection) once det M / r^{n-1} <= 1e-10, LeftDomain when the
// geodesic leaves the chart.
std::vector<JacobiSample> jacobi_along(const ChartMetric& m, std::span<const double> p,
                                       std::span<const double> theta, std::span<const double> radii,
                                       const GeodesicConfig& cfg = {});
JacobiSample jacobi_density(const ChartMetric& m, std::span<const double> p,
                            std::span<const double> theta, double r,
                            const GeodesicConfig& cfg = {});

// Unit directions at p with weights summing to |S^{n-1}|: n = 2 uniform
// angles; n >= 3 Gauss-Legendre in each polar angle times uniform azimuth.
struct DirectionQuadrature {
  std::vector<Vec> directions;  // chart components, g-unit at p
  std::vector<double> weights;
};
DirectionQuadrature direction_quadrature(const ChartMetric& m, std::span<const double> p,
                                         int resolution = 16);

// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int count, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

using PointFunction = std::function<double(std::span<const double>)>;

// Area S(r) of the geodesic sphere in the quadrature.
double sphere_area(const ChartMetric& m, std::span<const double> p, double r,
                   const DirectionQuadrature& q, const GeodesicConfig& cfg = {});
// h(r) = int u J / int J.
double spherical_mean(const ChartMetric& m, std::span<const double> p, const PointFunction& u,
                      double r, const DirectionQuadrature& q, const GeodesicConfig& cfg = {});
// Vol(B_r) = int_0^r S, Gauss-Legendre in the radius.
double ball_volume(const ChartMetric& m, std::span<const double> p, double r,
                   const DirectionQuadrature& q, int radial_nodes = 12,
                   const GeodesicConfig& cfg = {});

struct GeodiffEntry {
  double r = 0.0;
  double max_abs = 0.0;     // max over directions |d_r log(J/S)|, analytic d_r log J
  double max_abs_fd = 0.0;  // same from 4th-order central differences of log(J/S)
  double dlogS = 0.0;       // spherical mean of d_r log J
};
// fd_step defaults to min(r/4, 1e-3) per radius.
std::vector<GeodiffEntry> geodiff_check(const ChartMetric& m, std::span<const double> p,
                                        std::span<const double> radii,
                                        const DirectionQuadrature& q,
                                        const GeodesicConfig& cfg = {},
                                        std::optional<double> fd_step = std::nullopt);

// Variation field Y = h(t) E_frame(t) along the unit geodesic from p in
// direction theta; E_frame is a parallel unit field orthogonal to it.
struct ScalarProfile {
  std::function<double(double)> value, derivative;
};
ScalarProfile sine_profile(double L);  // sin(pi t / L)

// I(Y, Y) = int_0^L h'^2 - h^2 R(E, g', E, g') dt, composite Gauss-Legendre.
// Raises EndpointNonzero if |h(0)| or |h(L)| > 1e-12.
double index_form(const ChartMetric& m, std::span<const double> p, std::span<const double> theta,
                  double L, const ScalarProfile& h, int frame_index = 0, int panels = 16,
                  const GeodesicConfig& cfg = {});

// L_max = pi sqrt(n (n - 1 + 2 C_f) / mu). Raises NonContracting for
// mu <= 0, Error for C_f < 0.
double diameter_bound(const SolitonInstance& s, double c_f);
// max |f| over points (0 for 1-form instances with no potential).
double potential_sup(const SolitonInstance& s, const std::vector<std::vector<double>>& points);

// Comparison function data for the ODE maximum principle.
struct OsgoodCandidate {
  std::string name;
  std::function<double(double)> phi;
  double delta = 1.0;
  bool concave_flag = true;
  bool nonneg_flag = true;
};

struct OsgoodVerdict {
  bool osgood = false;
  // "linear" for phi <= c t, "log-linear" for phi <= c t log(1/t), "" otherwise.
  std::string tier;
  double fitted_c = 0.0;
  double tail_growth = 0.0;  // growth of phi/t over the sampled tail
};

// Sampled, conservative: certifies divergence of int dt/phi near 0 when
// phi/t or phi/(t log(1/t)) stays bounded along t = delta 2^-k, k in [8, 60].
// Raises FlagsUnverified unless both flags are set and sampling confirms
// nonnegativity, phi(0) = 0 and midpoint concavity.
OsgoodVerdict osgood_certify(const OsgoodCandidate& cand);

struct OdeDemoRow {
  double x, exact_quartic, zero_branch, perturbed_branch;
};
struct HbarRow {
  double start;       // hbar(0) = start
  double lipschitz;   // hbar(1) for hbar' = K hbar + hbar, K = 1
  double sqrt_case;   // hbar(1) for hbar' = 12 sqrt(hbar) + hbar
};
struct OdeDemo {
  double epsilon = 0.0;
  double zero_f1 = 0.0;       // f'' = 12 sqrt|f| from f(0) = f'(0) = 0
  double perturbed_f1 = 0.0;  // from f(eps) = eps^4, f'(eps) = 4 eps^3
  std::vector<OdeDemoRow> table;
  std::vector<HbarRow> hbar;
};
OdeDemo ode_counterexample_demo(double epsilon = 1e-3);

}  // namespace rw
