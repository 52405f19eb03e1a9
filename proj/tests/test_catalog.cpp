#include <gtest/gtest.h>

#include <cmath>

#include "rw/catalog.hpp"
#include "rw/errors.hpp"
#include "rw/sampling.hpp"

using namespace rw;

namespace {

double max_frame_residual(const SolitonInstance& s, int count, DiffMode mode = DiffMode::Jet) {
  double worst = 0;
  for (const auto& p : sample_points(s.metric->sample_box(), count, 5)) {
    const TensorValue r = soliton_residual(s, p, mode);
    worst = std::max(worst, frame_norm(r, s.metric->metric_at(p)));
  }
  return worst;
}

}  // namespace

TEST(Catalog, ListingCoversRequiredFamilies) {
  const auto names = catalog_names();
  for (const char* want : {"sphere_2", "sphere_3", "sphere_4", "hyperbolic_2", "hyperbolic_3",
                           "gaussian_2", "cigar", "flat_torus_2", "sphere_bad_f"})
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
  for (const auto& n : names) EXPECT_NO_THROW(catalog_get(n).validate()) << n;
}

TEST(Catalog, UnknownNameRaises) {
  EXPECT_THROW(catalog_get("sphere_9"), UnknownName);
  EXPECT_THROW(catalog_get("gaussian_2_mu=abc"), UnknownName);
  EXPECT_THROW(metric_get("nowhere"), UnknownName);
}

TEST(Catalog, ParametricGaussian) {
  const SolitonInstance s = catalog_get("gaussian_2_mu=1");
  EXPECT_EQ(s.dim(), 2);
  EXPECT_EQ(s.cls, SolitonClass::Contracting);
  const double p[] = {1.2, -0.7};
  const TensorValue h = hessian(*s.metric, *s.potential, p);
  EXPECT_DOUBLE_EQ(h(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(h(0, 1), 0.0);
  EXPECT_EQ(max_abs(curvature(*s.metric, p).ricci), 0.0);
  EXPECT_EQ(catalog_get("gaussian_3_mu=-2").cls, SolitonClass::Expanding);
  EXPECT_TRUE(catalog_get("gaussian_2_mu=0").trivial);
}

TEST(Catalog, SphereTwoBasics) {
  const SolitonInstance s = catalog_get("sphere_2");
  EXPECT_DOUBLE_EQ(s.mu, 2.0);
  EXPECT_TRUE(s.trivial);
  for (const auto& p : sample_points(s.metric->sample_box(), 20, 3))
    EXPECT_NEAR(curvature(*s.metric, p).scalar, 2.0, 1e-12);
}

TEST(Catalog, ClassTagMatchesSign) {
  EXPECT_EQ(catalog_get("hyperbolic_3").cls, SolitonClass::Expanding);
  EXPECT_EQ(catalog_get("cigar").cls, SolitonClass::Steady);
  EXPECT_EQ(catalog_get("sphere_4").cls, SolitonClass::Contracting);
  SolitonInstance bad = catalog_get("sphere_2");
  bad.cls = SolitonClass::Steady;
  EXPECT_THROW(bad.validate(), Error);
  SolitonInstance both = catalog_get("cigar");
  both.one_form = both.omega();
  EXPECT_THROW(both.validate(), Error);
}

TEST(SolitonResidual, TrueSolitonsVanish) {
  for (const auto& name : catalog_names()) {
    const SolitonInstance s = catalog_get(name);
    if (!s.expected_soliton) continue;
    const double tol = name == "cigar" ? 1e-6 : 1e-8;
    EXPECT_LE(max_frame_residual(s, 200), tol) << name;
  }
}

TEST(SolitonResidual, GaussianExactlyZero) {
  const SolitonInstance s = catalog_get("gaussian_3");
  const double p[] = {2.0, -1.0, 3.5};
  EXPECT_LE(max_abs(soliton_residual(s, p)), 1e-15);
}

TEST(SolitonResidual, NonExampleDetected) {
  const SolitonInstance s = catalog_get("sphere_bad_f");
  const double p[] = {M_PI / 3, 0.0};
  const TensorValue r = soliton_residual(s, p);
  // Hess cos(theta) = -cos(theta) g on the unit sphere.
  EXPECT_NEAR(r(0, 0), -0.5, 1e-12);
  EXPECT_GT(max_abs(r), 0.1);
  EXPECT_GE(max_frame_residual(s, 200), 1e-2);
}

TEST(SolitonResidual, FormAndGradientAgree) {
  for (const char* name : {"cigar", "gaussian_3", "cylinder_3", "sphere_bad_f", "hyperbolic_2"}) {
    const SolitonInstance s = catalog_get(name), w = as_one_form(s);
    for (const auto& p : sample_points(s.metric->sample_box(), 25, 9)) {
      const TensorValue a = soliton_residual(s, p), b = soliton_residual(w, p);
      EXPECT_LE(max_abs(a - b), 1e-9) << name;
    }
  }
}

TEST(SolitonResidual, RotatingFormSoliton) {
  const SolitonInstance s = catalog_get("gaussian_2_rot");
  EXPECT_FALSE(s.is_gradient());
  EXPECT_FALSE(s.trivial);
  EXPECT_LE(max_frame_residual(s, 50), 1e-12);
}

TEST(SolitonResidual, FiniteDifferenceMode) {
  for (const char* name : {"cigar", "sphere_3", "cylinder_4"}) {
    const SolitonInstance s = catalog_get(name);
    EXPECT_LE(max_frame_residual(s, 30, DiffMode::FiniteDifference), 1e-6) << name;
  }
}

TEST(ExpressionFile, ParsesInstance) {
  const char* text = R"(# round sphere, written out by hand
name = my_sphere
coords = theta phi
domain.theta = 0.05 pi-0.05
domain.phi = -2*pi 2*pi
sample.theta = 0.2 pi-0.2
g.theta.theta = 1
g.phi.phi = sin(theta)^2
f = 0
mu = 2
)";
  const SolitonInstance s = parse_instance(text);
  EXPECT_EQ(s.name, "my_sphere");
  EXPECT_TRUE(s.trivial);
  EXPECT_EQ(s.cls, SolitonClass::Contracting);
  EXPECT_NEAR(s.metric->sample_box().lo[0], 0.2, 1e-15);
  EXPECT_NEAR(s.metric->sample_box().lo[1], -2 * M_PI, 1e-15);
  const double p[] = {1.0, 0.5};
  EXPECT_LE(max_abs(soliton_residual(s, p)), 1e-12);
}

TEST(ExpressionFile, OneFormAndOffDiagonal) {
  const char* text = R"(
coords = x y
domain.x = -1 1
domain.y = -1 1
g.x.x = 2
g.y.y = 2
g.x.y = 0.5
omega.x = x
omega.y = y
mu = 2
)";
  const SolitonInstance s = parse_instance(text);
  EXPECT_FALSE(s.is_gradient());
  const double p[] = {0.1, 0.2};
  EXPECT_DOUBLE_EQ(s.metric->metric_at(p)(1, 0), 0.5);
}

TEST(ExpressionFile, Errors) {
  EXPECT_THROW(parse_instance("coords = x y\n"), ParseError);
  EXPECT_THROW(parse_instance("coords = x y\ndomain.x = 0 1\ndomain.y = 0 1\ng.x.x = 1\n"
                              "g.y.y = 1\nmu = 0\n"),
               ParseError);  // no potential
  EXPECT_THROW(parse_instance("coords = x y\ndomain.x = 0 1\ndomain.y = 0 1\ng.x.x = 1\n"
                              "g.y.y = q\nf = 0\nmu = 0\n"),
               ParseError);
  EXPECT_THROW(parse_instance("coords = x y\ndomain.x = 0 1\ndomain.z = 0 1\n"), ParseError);
  EXPECT_THROW(parse_instance("coords = x y\nbogus\n"), ParseError);
}
