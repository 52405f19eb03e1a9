#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rw/catalog.hpp"
#include "rw/errors.hpp"
#include "rw/identities.hpp"
#include "rw/sampling.hpp"

using namespace rw;

namespace {

SuiteConfig cfg(int samples = 60) {
  SuiteConfig c;
  c.samples = samples;
  c.seed = 7;
  c.threads = 2;
  return c;
}

const IdentityReport& find(const std::vector<IdentityReport>& v, IdentityId id) {
  for (const auto& r : v)
    if (r.identity == id) return r;
  throw std::runtime_error("identity missing from suite");
}

// A random smooth non-soliton triple: perturbed metric, potential, mu.
SolitonInstance random_triple(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  ExprTensor g(n, downs(2), Expr(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const Expr xi = Expr::var(i), xj = Expr::var(j);
      Expr e = Expr(u(rng)) * sin(Expr(1.0 + u(rng)) * xi + Expr(u(rng)) * xj);
      if (i == j) e = Expr(1.5) + e + Expr(0.1) * pow(Expr::var((i + 1) % n), 2);
      else e = Expr(0.2) * e;
      g(i, j) = g(j, i) = e;
    }
  SolitonInstance s;
  s.name = "fuzz";
  const std::vector<std::string> names{"a", "b", "c", "d"};
  s.metric = std::make_shared<const ChartMetric>(
      "fuzz", std::vector<std::string>(names.begin(), names.begin() + n),
      Box{std::vector<double>(n, -1.0), std::vector<double>(n, 1.0)}, g,
      Box{std::vector<double>(n, -0.5), std::vector<double>(n, 0.5)});
  Expr f(0.0);
  for (int i = 0; i < n; ++i) f = f + Expr(u(rng)) * cos(Expr(1.0 + u(rng)) * Expr::var(i));
  s.potential = f + Expr(0.3) * Expr::var(0) * Expr::var(n - 1);
  s.mu = 2.0 * u(rng) + 0.7;
  s.cls = class_of(s.mu);
  s.expected_soliton = false;
  s.validate();
  return s;
}

}  // namespace

TEST(Admissibility, CountsPerInstance) {
  EXPECT_EQ(admissible_identities(catalog_get("sphere_3")).size(), 13u);
  EXPECT_EQ(admissible_identities(catalog_get("cigar")).size(), 12u);
  const auto s2 = admissible_identities(catalog_get("sphere_2"));
  EXPECT_EQ(s2.size(), 12u);
  EXPECT_NE(std::find(s2.begin(), s2.end(), IdentityId::I11), s2.end());
  EXPECT_EQ(std::find(s2.begin(), s2.end(), IdentityId::I8), s2.end());
  const auto rot = admissible_identities(catalog_get("gaussian_2_rot"));
  EXPECT_EQ(rot.size(), 4u);  // I9, I10, I13, I14
}

TEST(Identity, ParseTags) {
  EXPECT_EQ(parse_identity("I5"), IdentityId::I5);
  EXPECT_EQ(parse_identity("14"), IdentityId::I14);
  EXPECT_THROW(parse_identity("I15"), UnknownName);
  EXPECT_THROW(parse_identity("X"), UnknownName);
}

TEST(Identity, ContractedEquationOnSphere3) {
  const SolitonInstance s = catalog_get("sphere_3");
  const auto pts = sample_points(s.metric->sample_box(), 200, 1);
  const IdentityReport r = check_identity(IdentityId::I1, s, pts, 1e-8);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_residual, 1e-8);
  EXPECT_EQ(r.samples, 200);
  EXPECT_GE(r.max_residual, r.mean_residual);
}

TEST(Identity, FlatGaussianVanishes) {
  const SolitonInstance s = catalog_get("gaussian_2_mu=1");
  const auto pts = sample_points(s.metric->sample_box(), 50, 1);
  EXPECT_LE(check_identity(IdentityId::I5, s, pts, 1e-9).max_residual, 1e-9);
}

TEST(Identity, CigarConservedQuantity) {
  const SolitonInstance s = catalog_get("cigar");
  const auto pts = sample_points(s.metric->sample_box(), 200, 1);
  const IdentityReport r = check_identity(IdentityId::I4, s, pts, 1e-6);
  ASSERT_TRUE(r.value_mean && r.value_std);
  EXPECT_NEAR(*r.value_mean, 4.0, 1e-4);
  EXPECT_LE(*r.value_std, 1e-6);
  EXPECT_TRUE(r.pass);
}

TEST(Identity, FormVersionReducesToScalarLaplacian) {
  const SolitonInstance s = catalog_get("sphere_2");
  const auto pts = sample_points(s.metric->sample_box(), 50, 2);
  EXPECT_LE(check_identity(IdentityId::I13, s, pts, 1e-8).max_residual, 1e-8);
  const SolitonInstance c = catalog_get("cigar"), w = as_one_form(c);
  for (const auto& p : sample_points(c.metric->sample_box(), 30, 4)) {
    const LocalGeometry lg(*c.metric, p);
    const double a = identity_value(IdentityId::I13, c, lg);
    const double b = identity_value(IdentityId::I13, w, lg);
    const double i5 = identity_value(IdentityId::I5, c, lg);
    EXPECT_LE(std::abs(a - b), 1e-9);
    EXPECT_LE(std::abs(a - i5), 1e-9);
  }
}

TEST(Identity, InadmissibleRaises) {
  const SolitonInstance s = catalog_get("sphere_2");
  const auto pts = sample_points(s.metric->sample_box(), 3, 1);
  EXPECT_THROW(check_identity(IdentityId::I8, s, pts, 1e-5), DimensionMismatch);
  EXPECT_THROW(check_identity(IdentityId::I11, catalog_get("sphere_3"), pts, 1e-5),
               DimensionMismatch);
}

TEST(Suite, EveryTrueSolitonPasses) {
  for (const auto& name : catalog_names()) {
    const SolitonInstance s = catalog_get(name);
    if (!s.expected_soliton) continue;
    for (const auto& r : run_suite(s, cfg())) {
      EXPECT_TRUE(r.pass) << name << " " << to_string(r.identity) << " max " << r.max_residual
                          << (r.error ? " error: " + *r.error : std::string());
    }
  }
}

TEST(Suite, CigarHasTwelvePassingReports) {
  const auto reps = run_suite(catalog_get("cigar"), cfg(200));
  EXPECT_EQ(reps.size(), 12u);
  for (const auto& r : reps) EXPECT_TRUE(r.pass) << to_string(r.identity);
}

TEST(Suite, NonExampleFailsContractedEquation) {
  const auto reps = run_suite(catalog_get("sphere_bad_f"), cfg());
  const IdentityReport& i1 = find(reps, IdentityId::I1);
  EXPECT_FALSE(i1.pass);
  EXPECT_GT(i1.max_residual, 0.1);
  // Generic identities still hold.
  EXPECT_TRUE(find(reps, IdentityId::I12).pass);
  EXPECT_TRUE(find(reps, IdentityId::I9).pass);
  EXPECT_TRUE(find(reps, IdentityId::I10).pass);
}

TEST(Suite, DeterministicAcrossThreadCounts) {
  SuiteConfig a = cfg(40), b = cfg(40);
  a.threads = 1;
  b.threads = 3;
  const auto ra = run_suite(catalog_get("cylinder_3"), a);
  const auto rb = run_suite(catalog_get("cylinder_3"), b);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t k = 0; k < ra.size(); ++k) {
    EXPECT_EQ(ra[k].max_residual, rb[k].max_residual);
    EXPECT_EQ(ra[k].mean_residual, rb[k].mean_residual);
    EXPECT_EQ(ra[k].worst_point, rb[k].worst_point);
  }
}

TEST(Suite, FiniteDifferenceModeWithinRelaxedTolerance) {
  SuiteConfig c = cfg(25);
  c.mode = DiffMode::FiniteDifference;
  for (const auto& name : catalog_names()) {
    const SolitonInstance s = catalog_get(name);
    if (!s.expected_soliton) continue;
    for (const auto& r : run_suite(s, c))
      EXPECT_TRUE(r.pass) << name << " " << to_string(r.identity) << " max " << r.max_residual;
  }
}

TEST(Fuzz, GenericIdentitiesOnRandomTriples) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + t % 3;
    const SolitonInstance s = random_triple(n, rng);
    const auto pts = sample_points(s.metric->sample_box(), 8, t);
    for (auto id : {IdentityId::I12, IdentityId::I10, IdentityId::I9}) {
      const IdentityReport r = check_identity(id, s, pts, 1e-5);
      EXPECT_TRUE(r.pass) << "triple " << t << " " << to_string(id) << " " << r.max_residual;
    }
    // A random triple is not a soliton.
    EXPECT_FALSE(check_identity(IdentityId::I1, s, pts, 1e-5).pass);
  }
}

TEST(Fuzz, SchurOnRandomMetrics) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 10; ++t) {
    const SolitonInstance s = random_triple(3 + t % 2, rng);
    const auto pts = sample_points(s.metric->sample_box(), 6, t);
    EXPECT_LE(check_identity(IdentityId::I8, s, pts, 1e-6).max_residual, 1e-6);
  }
}

TEST(Interchange, PublicResidualOnArbitraryForms) {
  const SolitonInstance s = catalog_get("hyperbolic_3");
  const double p[] = {0.3, -0.2, 0.4};
  const LocalGeometry lg(*s.metric, p);
  for (int k = 0; k < 3; ++k) EXPECT_LE(interchange_residual(lg, test_one_form(3, k)), 1e-10);
  EXPECT_THROW(interchange_residual(lg, test_one_form(2, 0)), ShapeMismatch);
}
