#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rw/catalog.hpp"
#include "rw/errors.hpp"
#include "rw/geodesic.hpp"
#include "rw/sampling.hpp"

using namespace rw;

namespace {

constexpr double kPi = std::numbers::pi;

const ChartMetric& s2() {
  static const auto m = metric_get("sphere_2");
  return *m;
}

// Great-circle distance on the unit sphere in (theta, phi) coordinates.
double sphere_distance(std::span<const double> a, std::span<const double> b) {
  const double c = std::cos(a[0]) * std::cos(b[0]) +
                   std::sin(a[0]) * std::sin(b[0]) * std::cos(a[1] - b[1]);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

TEST(Ode, ExponentialAndHarmonic) {
  OdeConfig cfg;
  Vec y{1.0, 0.0};
  double h = 0;
  const OdeRhs f = [](double, std::span<const double> a, std::span<double> d) {
    d[0] = a[1];
    d[1] = -a[0];
  };
  ode_integrate(f, y, 0.0, 2 * kPi, cfg, h);
  EXPECT_NEAR(y[0], 1.0, 1e-10);
  EXPECT_NEAR(y[1], 0.0, 1e-10);
  ode_integrate(f, y, 2 * kPi, 0.0, cfg, h);  // backwards
  EXPECT_NEAR(y[0], 1.0, 1e-10);
}

TEST(PointCurvature, SphereValues) {
  const double p[] = {kPi / 3, 0.2};
  const PointCurvature c = point_curvature(s2(), p);
  EXPECT_NEAR(c.gamma(0, 1, 1), -0.4330127018922193, 1e-14);
  // R(d_th, d_ph) d_ph = sin^2 d_th: R_{0 1 1}^0 = sin^2(theta).
  EXPECT_NEAR(c.riemann(0, 1, 1, 0), std::pow(std::sin(kPi / 3), 2), 1e-13);
  EXPECT_NEAR(c.riemann(0, 1, 0, 1), -1.0, 1e-13);
  // Agrees with the jet engine.
  const CurvatureBundle b = curvature(s2(), p);
  EXPECT_LE(max_abs(c.gamma - b.christoffel), 1e-14);
}

TEST(PointCurvature, MatchesJetEngineOnAllMetrics) {
  for (const auto& name : catalog_names()) {
    const auto m = metric_get(name);
    for (const auto& p : sample_points(m->sample_box(), 4, 3)) {
      const PointCurvature c = point_curvature(*m, p);
      const CurvatureBundle b = curvature(*m, p);
      const int n = m->dim();
      double worst = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              double low = 0;  // R_ijkl = g_km R_ijl^m
              for (int mm = 0; mm < n; ++mm) low += b.metric(k, mm) * c.riemann(i, j, l, mm);
              worst = std::max(worst, std::abs(low - b.riemann(i, j, k, l)));
            }
      EXPECT_LE(worst, 1e-9 * (1 + max_abs(b.riemann))) << name;
    }
  }
}

TEST(Geodesic, FlatStraightLines) {
  const auto m = metric_get("flat_torus_2");
  const double p[] = {1.0, 2.0}, th[] = {0.6, 0.8};
  const auto st = integrate_geodesic(*m, p, th, 3.0, 6);
  ASSERT_EQ(st.size(), 7u);
  for (const auto& s : st) {
    EXPECT_NEAR(s.position[0], 1.0 + 0.6 * s.t, 1e-13);
    EXPECT_NEAR(s.position[1], 2.0 + 0.8 * s.t, 1e-13);
  }
}

TEST(Geodesic, EquatorReachesAntipode) {
  const double p[] = {kPi / 2, 0.0}, th[] = {0.0, 1.0};
  const auto st = integrate_geodesic(s2(), p, th, kPi, 8);
  EXPECT_NEAR(st.back().position[0], kPi / 2, 1e-7);
  EXPECT_NEAR(st.back().position[1], kPi, 1e-7);
}

TEST(Geodesic, UnitSpeedAndGreatCircleDistance) {
  const double p[] = {kPi / 2, 0.0}, th[] = {1.0, 0.7};
  const auto st = integrate_geodesic(s2(), p, th, 1.2, 12);
  for (const auto& s : st) {
    const TensorValue g = s2().metric_at(s.position);
    const double sp = g(0, 0) * s.velocity[0] * s.velocity[0] + g(1, 1) * s.velocity[1] * s.velocity[1];
    EXPECT_NEAR(sp, 1.0, 1e-8);
    EXPECT_NEAR(sphere_distance(p, s.position), s.t, 1e-9);
  }
}

TEST(Geodesic, CigarRadialStaysRadial) {
  const auto m = metric_get("cigar");
  const double p[] = {0.0, 0.0}, th[] = {1.0, 1.0};
  for (const auto& s : integrate_geodesic(*m, p, th, 2.0, 10))
    EXPECT_NEAR(s.position[0] - s.position[1], 0.0, 1e-8);
  // Radial arclength: s = asinh(r) for metric dr^2 / (1 + r^2).
  const auto end = integrate_geodesic(*m, p, th, 2.0, 1).back();
  EXPECT_NEAR(std::hypot(end.position[0], end.position[1]), std::sinh(2.0), 1e-8);
}

TEST(Geodesic, LeavingTheChartReportsArclength) {
  const double p[] = {kPi / 2, 0.0}, th[] = {1.0, 0.0};
  try {
    integrate_geodesic(s2(), p, th, 3.0, 4);
    FAIL() << "expected LeftDomain";
  } catch (const LeftDomain& e) {
    // theta leaves [0.05, pi - 0.05] at arclength pi/2 - 0.05.
    EXPECT_NEAR(e.exit_arclength(), kPi / 2 - 0.05, 1e-8);
  }
}

TEST(Jacobi, SphereDensityIsSine) {
  const double p[] = {kPi / 2, 0.0};
  for (double a : {0.0, 0.4, 1.1, 2.0, 3.0, 4.5}) {
    const double th[] = {std::cos(a), std::sin(a)};
    for (double r : {0.01, 0.3, 0.8, 1.2}) {
      const JacobiSample s = jacobi_density(s2(), p, th, r);
      EXPECT_NEAR(s.J, std::sin(r), 1e-9);
      EXPECT_NEAR(s.dlogJ, std::cos(r) / std::sin(r), 1e-8);
      EXPECT_LE(s.frame_error, 1e-7);
      EXPECT_LE(s.speed_error, 1e-8);
    }
  }
  const double eq[] = {0.0, 1.0};
  EXPECT_NEAR(jacobi_density(s2(), p, eq, 3.1).J, std::sin(3.1), 1e-9);
}

TEST(Jacobi, ConjugatePointAtPi) {
  const double p[] = {kPi / 2, 0.0}, eq[] = {0.0, 1.0};
  try {
    jacobi_density(s2(), p, eq, 3.5);
    FAIL() << "expected ConjugatePoint";
  } catch (const ConjugatePoint& e) {
    EXPECT_NEAR(e.radius(), kPi, 1e-6);
  }
}

TEST(Jacobi, FlatDensityIsPower) {
  for (int n = 2; n <= 4; ++n) {
    const auto m = metric_get("gaussian_" + std::to_string(n));
    const Vec p(n, 0.3);
    Vec th(n, 1.0);
    th[0] = -0.5;
    for (double r : {0.5, 2.0}) {
      const JacobiSample s = jacobi_density(*m, p, th, r);
      EXPECT_NEAR(s.J, std::pow(r, n - 1), 1e-10 * std::pow(r, n - 1));
    }
  }
}

TEST(Jacobi, AgreesWithExponentialMapVariation) {
  // J for n = 2 equals |d exp_p(r theta(a)) / da| for an angle parametrization.
  const auto m = metric_get("ellipsoid");
  const double p[] = {kPi / 3, 0.0};
  const double r = 0.7, a = 0.9, h = 1e-5;
  const Vec c = unit_vector(*m, p, std::vector<double>{1.0, 0.0});
  const TensorValue g = m->metric_at(p);
  auto dir = [&](double ang) {
    // Orthonormal frame at p for the diagonal metric.
    return std::vector<double>{std::cos(ang) / std::sqrt(g(0, 0)), std::sin(ang) / std::sqrt(g(1, 1))};
  };
  (void)c;
  auto end = [&](double ang) { return integrate_geodesic(*m, p, dir(ang), r, 1).back().position; };
  const Vec e1 = end(a + h), e0 = end(a - h);
  Vec d{(e1[0] - e0[0]) / (2 * h), (e1[1] - e0[1]) / (2 * h)};
  const Vec q = end(a);
  const TensorValue gq = m->metric_at(q);
  const double len = std::sqrt(gq(0, 0) * d[0] * d[0] + gq(1, 1) * d[1] * d[1]);
  EXPECT_NEAR(jacobi_density(*m, p, dir(a), r).J, len, 1e-7);
}

TEST(Jacobi, SmallRadiusLaw) {
  for (const auto& name : catalog_names()) {
    const auto m = metric_get(name);
    const Box& b = m->sample_box();
    Vec p(m->dim());
    for (int i = 0; i < m->dim(); ++i) p[i] = 0.5 * (b.lo[i] + b.hi[i]) + 0.1;
    const auto q = direction_quadrature(*m, p, m->dim() == 4 ? 3 : 4);
    for (std::size_t k = 0; k < q.directions.size(); k += 3) {
      const double J = jacobi_density(*m, p, q.directions[k], 1e-2).J;
      EXPECT_NEAR(J / std::pow(1e-2, m->dim() - 1), 1.0, 0.02) << name;
    }
  }
}

TEST(Quadrature, GaussLegendreExactness) {
  std::vector<double> x, w;
  gauss_legendre(6, 0.0, 2.0, x, w);
  double s = 0, s11 = 0;
  for (int i = 0; i < 6; ++i) {
    s += w[i];
    s11 += w[i] * std::pow(x[i], 11);
  }
  EXPECT_NEAR(s, 2.0, 1e-14);
  EXPECT_NEAR(s11, std::pow(2.0, 12) / 12, 1e-10);
}

TEST(Quadrature, DirectionsAreUnitAndWeightsSumToArea) {
  const double area[] = {0, 0, 2 * kPi, 4 * kPi, 2 * kPi * kPi};
  for (const char* name : {"ellipsoid", "sphere_3", "hyperbolic_4"}) {
    const auto m = metric_get(name);
    const Box& b = m->sample_box();
    Vec p(m->dim());
    for (int i = 0; i < m->dim(); ++i) p[i] = 0.4 * b.lo[i] + 0.6 * b.hi[i];
    const auto q = direction_quadrature(*m, p, 8);
    double s = 0;
    const TensorValue g = m->metric_at(p);
    for (std::size_t k = 0; k < q.directions.size(); ++k) {
      s += q.weights[k];
      double len = 0;
      for (int i = 0; i < m->dim(); ++i)
        for (int j = 0; j < m->dim(); ++j) len += g(i, j) * q.directions[k][i] * q.directions[k][j];
      EXPECT_NEAR(len, 1.0, 1e-12);
    }
    EXPECT_NEAR(s, area[m->dim()], 1e-8) << name;
  }
}

TEST(SphericalMean, ConstantsFlatAndSphere) {
  const double p[] = {kPi / 2, 0.0};
  const auto q = direction_quadrature(s2(), p, 16);
  EXPECT_NEAR(spherical_mean(s2(), p, [](auto) { return 3.5; }, 0.7, q), 3.5, 1e-13);
  const PointFunction u = [&](std::span<const double> x) { return std::cos(sphere_distance(p, x)); };
  for (double r : {0.2, 0.9, 1.2}) EXPECT_NEAR(spherical_mean(s2(), p, u, r, q), std::cos(r), 1e-6);
  EXPECT_NEAR(sphere_area(s2(), p, 0.9, q), 2 * kPi * std::sin(0.9), 1e-9);

  const auto flat = metric_get("gaussian_2");
  const double c[] = {0.5, -0.25};
  const auto qf = direction_quadrature(*flat, c, 16);
  const PointFunction d2 = [&](std::span<const double> x) {
    return (x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]);
  };
  EXPECT_NEAR(spherical_mean(*flat, c, d2, 1.5, qf), 2.25, 1e-9);
}

TEST(SphericalMean, AreaDerivativeIsMeanOfDensityDerivative) {
  for (const char* name : {"ellipsoid", "cigar", "sphere_3"}) {
    const auto m = metric_get(name);
    const Box& b = m->sample_box();
    Vec p(m->dim());
    for (int i = 0; i < m->dim(); ++i) p[i] = 0.55 * b.lo[i] + 0.45 * b.hi[i];
    const auto q = direction_quadrature(*m, p, 8);
    const double r = 0.3, h = 1e-3;
    auto ls = [&](double x) { return std::log(sphere_area(*m, p, x, q)); };
    const double fd = (-ls(r + 2 * h) + 8 * ls(r + h) - 8 * ls(r - h) + ls(r - 2 * h)) / (12 * h);
    const double radii[] = {r};
    const auto e = geodiff_check(*m, p, radii, q);
    EXPECT_NEAR(e[0].dlogS, fd, 1e-6) << name;
  }
}

TEST(SphericalMean, BallVolumeBelowRadiusTimesArea) {
  for (const char* name : {"ellipsoid", "sphere_2", "hyperbolic_2", "cylinder_3"}) {
    const auto m = metric_get(name);
    const Box& b = m->sample_box();
    Vec p(m->dim());
    for (int i = 0; i < m->dim(); ++i) p[i] = 0.5 * (b.lo[i] + b.hi[i]);
    const auto q = direction_quadrature(*m, p, 6);
    for (double r : {0.05, 0.2}) EXPECT_LE(ball_volume(*m, p, r, q) / sphere_area(*m, p, r, q), r) << name;
  }
  // Exact on the sphere: Vol = 2 pi (1 - cos r).
  const double p[] = {kPi / 2, 0.0};
  const auto q = direction_quadrature(s2(), p, 8);
  EXPECT_NEAR(ball_volume(s2(), p, 0.8, q), 2 * kPi * (1 - std::cos(0.8)), 1e-10);
}

TEST(Geodiff, HomogeneousAndEllipsoid) {
  const double p[] = {kPi / 2, 0.0};
  const auto q = direction_quadrature(s2(), p, 16);
  const double radii[] = {0.05, 0.2, 0.6, 1.0};
  for (const auto& e : geodiff_check(s2(), p, radii, q)) {
    EXPECT_LE(e.max_abs, 1e-6);
    EXPECT_LE(e.max_abs_fd, 1e-6);
  }
  const auto flat = metric_get("flat_torus_2");
  const double c[] = {1.0, 1.0};
  for (const auto& e : geodiff_check(*flat, c, radii, direction_quadrature(*flat, c, 8)))
    EXPECT_LE(e.max_abs, 1e-9);

  const auto ell = metric_get("ellipsoid");
  const double pe[] = {kPi / 3, 0.0};
  const double er[] = {0.05, 0.1, 0.2, 0.4};
  const auto ge = geodiff_check(*ell, pe, er, direction_quadrature(*ell, pe, 16));
  EXPECT_LE(ge[0].max_abs, 0.05);
  EXPECT_GT(ge[3].max_abs, ge[0].max_abs);
  for (std::size_t i = 1; i < ge.size(); ++i) EXPECT_GT(ge[i].max_abs, ge[i - 1].max_abs);
  for (const auto& e : ge) EXPECT_NEAR(e.max_abs, e.max_abs_fd, 1e-6 + 1e-4 * e.max_abs);
}

TEST(IndexForm, SphereAndFlat) {
  const double p[] = {kPi / 2, 0.0}, eq[] = {0.0, 1.0};
  EXPECT_NEAR(index_form(s2(), p, eq, kPi / 2, sine_profile(kPi / 2)), 3 * kPi / 4, 1e-9);
  EXPECT_NEAR(index_form(s2(), p, eq, kPi, sine_profile(kPi)), 0.0, 1e-9);
  const auto flat = metric_get("flat_torus_3");
  const double c[] = {1.0, 2.0, 3.0}, th[] = {1.0, 0.5, -0.2};
  for (double L : {0.5, 2.0})
    for (int fi : {0, 1})
      EXPECT_NEAR(index_form(*flat, c, th, L, sine_profile(L), fi), kPi * kPi / (2 * L), 1e-10);
  const ScalarProfile bad{[](double t) { return 1.0 + t; }, [](double) { return 1.0; }};
  EXPECT_THROW(index_form(s2(), p, eq, 1.0, bad), EndpointNonzero);
  EXPECT_THROW(index_form(s2(), p, eq, 1.0, sine_profile(1.0), 1), DimensionMismatch);
}

TEST(IndexForm, NonnegativeOnShortGeodesics) {
  for (const char* name : {"sphere_3", "cigar", "cylinder_3", "hyperbolic_2", "ellipsoid"}) {
    const auto m = metric_get(name);
    const Box& b = m->sample_box();
    Vec p(m->dim()), th(m->dim(), 0.3);
    for (int i = 0; i < m->dim(); ++i) p[i] = 0.5 * (b.lo[i] + b.hi[i]);
    th[0] = 1.0;
    for (int fi = 0; fi < m->dim() - 1; ++fi)
      EXPECT_GE(index_form(*m, p, th, 0.8, sine_profile(0.8), fi), 0.0) << name;
  }
}

TEST(Diameter, SpheresGivePi) {
  for (int n = 2; n <= 4; ++n)
    EXPECT_EQ(diameter_bound(catalog_get("sphere_" + std::to_string(n)), 0.0), kPi);
  EXPECT_THROW(diameter_bound(catalog_get("cigar"), 0.0), NonContracting);
  EXPECT_THROW(diameter_bound(catalog_get("hyperbolic_2"), 0.0), NonContracting);
  EXPECT_THROW(diameter_bound(catalog_get("sphere_2"), -1.0), Error);
  const auto g = catalog_get("gaussian_2");
  const auto pts = sample_points(g.metric->sample_box(), 50, 1);
  const double c = potential_sup(g, pts);
  EXPECT_GT(c, 0.0);
  EXPECT_GT(diameter_bound(g, c), 0.0);
}

TEST(Osgood, LinearAndSquareRoot) {
  const OsgoodVerdict lin = osgood_certify({"Kt", [](double t) { return 3.0 * t; }, 1.0});
  EXPECT_TRUE(lin.osgood);
  EXPECT_EQ(lin.tier, "linear");
  EXPECT_NEAR(lin.fitted_c, 3.0, 1e-12);
  const OsgoodVerdict sq = osgood_certify({"12sqrt", [](double t) { return 12.0 * std::sqrt(t); }, 1.0});
  EXPECT_FALSE(sq.osgood);
  const OsgoodVerdict tl = osgood_certify(
      {"tlog", [](double t) { return t == 0 ? 0.0 : t * std::log(1.0 / t); }, 0.3});
  EXPECT_TRUE(tl.osgood);
  EXPECT_EQ(tl.tier, "log-linear");
  EXPECT_FALSE(osgood_certify({"t^0.9", [](double t) { return std::pow(t, 0.9); }, 1.0}).osgood);
  EXPECT_FALSE(osgood_certify({"shift", [](double t) { return 1.0 + t; }, 1.0}).osgood);
}

TEST(Osgood, FlagsVerified) {
  EXPECT_THROW(osgood_certify({"convex", [](double t) { return t * t; }, 1.0}), FlagsUnverified);
  EXPECT_THROW(osgood_certify({"negative", [](double t) { return -t; }, 1.0}), FlagsUnverified);
  EXPECT_THROW(osgood_certify({"unflagged", [](double t) { return t; }, 1.0, false, true}),
               FlagsUnverified);
}

TEST(OdeDemo, BothBranches) {
  const OdeDemo d = ode_counterexample_demo();
  EXPECT_EQ(d.zero_f1, 0.0);
  EXPECT_NEAR(d.perturbed_f1, 1.0, 1e-4);
  for (const auto& row : d.table)
    if (row.x >= d.epsilon) EXPECT_NEAR(row.perturbed_branch, row.exact_quartic, 1e-4);
  ASSERT_EQ(d.hbar.size(), 4u);
  EXPECT_EQ(d.hbar[0].lipschitz, 0.0);
  EXPECT_EQ(d.hbar[0].sqrt_case, 0.0);
  // Lipschitz comparison: perturbations die with the start; the square-root
  // case leaves the zero solution by a fixed amount.
  EXPECT_NEAR(d.hbar[1].lipschitz, 1e-12 * std::exp(2.0), 1e-3 * 1e-12 * std::exp(2.0));
  EXPECT_GT(d.hbar[1].sqrt_case, 30.0);
  EXPECT_NEAR(d.hbar[1].sqrt_case, d.hbar[2].sqrt_case, 1e-2 * d.hbar[2].sqrt_case);
}
