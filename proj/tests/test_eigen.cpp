#include <gtest/gtest.h>

#include <cmath>

#include "rw/catalog.hpp"
#include "rw/eigen_analysis.hpp"
#include "rw/sampling.hpp"

using namespace rw;

TEST(EigenPolynomial, WorkedTuples) {
  EXPECT_DOUBLE_EQ(eigen_polynomial(3, 0, 2, 2), 0.0);
  EXPECT_DOUBLE_EQ(eigen_polynomial(3, 1, 3, 3), 0.0);
  EXPECT_DOUBLE_EQ(eigen_polynomial(3, 1, 6, 14), -8.0);
  EXPECT_DOUBLE_EQ(eigen_factored(3, 1, 5, 13), -8.0);
  EXPECT_DOUBLE_EQ(eigen_factored(3, 0, 2, 2), 0.0);
}

TEST(EigenPolynomial, FuzzPasses) {
  const EigenPolyFuzz f = eigen_poly_fuzz(10000, 7);
  EXPECT_EQ(f.count, 20000);
  EXPECT_LE(f.max_rel_deviation, 1e-10);
  EXPECT_EQ(f.sign_violations, 0);
  EXPECT_GE(f.nonneg_tuples, 10000);
  EXPECT_LE(f.max_factored_nonneg, 1e-12);
  EXPECT_TRUE(f.pass());
}

TEST(EigenPolynomial, FuzzDeterministic) {
  const EigenPolyFuzz a = eigen_poly_fuzz(500, 3), b = eigen_poly_fuzz(500, 3);
  EXPECT_EQ(a.max_rel_deviation, b.max_rel_deviation);
  EXPECT_EQ(a.max_factored_nonneg, b.max_factored_nonneg);
}

TEST(GeneralizedEigen, AgainstCongruence) {
  TensorValue g(2, downs(2)), a(2, downs(2));
  g(0, 0) = 2;
  g(1, 1) = 3;
  g(0, 1) = g(1, 0) = 1;
  a(0, 0) = 1;
  a(1, 1) = 0;
  a(0, 1) = a(1, 0) = 0;
  // det(A - l g) = (1 - 2l)(-3l) - l^2 = 5 l^2 - 3 l
  const auto ev = generalized_eigenvalues(a, g);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0], 0.0, 1e-14);
  EXPECT_NEAR(ev[1], 0.6, 1e-14);
}

TEST(RicciEigen, Spheres) {
  for (int n = 2; n <= 4; ++n) {
    const SolitonInstance s = catalog_get("sphere_" + std::to_string(n));
    for (const auto& p : sample_points(s.metric->sample_box(), 20, 2)) {
      const EigenEntry e = ricci_eigen(s, p);
      ASSERT_EQ(static_cast<int>(e.eigenvalues.size()), n);
      for (double l : e.eigenvalues) EXPECT_NEAR(l, n - 1.0, 1e-9);
      EXPECT_NEAR(e.ratio, 1.0 / n, 1e-10);
      ASSERT_EQ(e.groups.size(), 1u);
      EXPECT_EQ(e.groups[0].multiplicity, n);
      EXPECT_EQ(e.dichotomy, Dichotomy::AllEqual);
    }
  }
}

TEST(RicciEigen, GaussianFlat) {
  const SolitonInstance s = catalog_get("gaussian_3");
  const double p[] = {0.3, 1.0, -2.0};
  const EigenEntry e = ricci_eigen(s, p);
  for (double l : e.eigenvalues) EXPECT_EQ(l, 0.0);
  EXPECT_TRUE(std::isnan(e.ratio));
}

TEST(RicciEigen, CigarOrigin) {
  const SolitonInstance s = catalog_get("cigar");
  const double p[] = {0.0, 0.0};
  const EigenEntry e = ricci_eigen(s, p);
  EXPECT_NEAR(e.eigenvalues[0], 2.0, 1e-12);
  EXPECT_NEAR(e.eigenvalues[1], 2.0, 1e-12);
  EXPECT_NEAR(e.scalar, 4.0, 1e-12);
}

TEST(RicciEigen, TraceMatchesScalar) {
  for (const char* name : {"cigar", "cylinder_3", "cylinder_4", "hyperbolic_4", "sphere_bad_f"}) {
    const SolitonInstance s = catalog_get(name);
    for (const auto& p : sample_points(s.metric->sample_box(), 30, 8))
      EXPECT_LE(ricci_eigen(s, p).trace_error, 1e-8) << name;
  }
}

TEST(RicciEigen, CylinderSitsOnDichotomy) {
  const SolitonInstance s = catalog_get("cylinder_3");
  const double p[] = {1.0, 0.4, 0.7};
  const EigenEntry e = ricci_eigen(s, p);
  EXPECT_NEAR(e.eigenvalues[0], 0.0, 1e-12);
  EXPECT_EQ(e.dichotomy, Dichotomy::MinZeroOthersEqual);
  // The equality case of the polynomial.
  EXPECT_NEAR(eigen_polynomial(3, e.eigenvalues[0], e.scalar, e.ric_norm_sq), 0.0, 1e-9);
}

TEST(Triviality, EinsteinAndFallback) {
  const auto sph = catalog_get("sphere_3");
  const auto t1 = triviality_check(sph, sample_points(sph.metric->sample_box(), 50, 1));
  EXPECT_TRUE(t1.einstein);
  EXPECT_LE(t1.max_tracefree, 1e-8);
  const auto hyp = catalog_get("hyperbolic_3");
  EXPECT_TRUE(triviality_check(hyp, sample_points(hyp.metric->sample_box(), 50, 1)).einstein);
  const auto cig = catalog_get("cigar");
  const auto t2 = triviality_check(cig, sample_points(cig.metric->sample_box(), 50, 1), 1e-8, 2);
  EXPECT_TRUE(t2.n2_fallback);
  EXPECT_FALSE(t2.einstein);
  EXPECT_GT(t2.scalar_spread, 0.1);
  const auto cyl = catalog_get("cylinder_4");
  EXPECT_FALSE(triviality_check(cyl, sample_points(cyl.metric->sample_box(), 20, 1)).einstein);
}
