#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "rw/errors.hpp"
#include "rw/expr.hpp"
#include "rw/jet.hpp"

using namespace rw;

namespace {

Jet var(const JetSpace& s, int v, double at) { return Jet::variable(s, kMaxOrder, v, at); }

}  // namespace

TEST(JetSpace, MonomialCountsAndGrading) {
  EXPECT_EQ(JetSpace::of(1).size(4), 5);
  EXPECT_EQ(JetSpace::of(2).size(4), 15);
  EXPECT_EQ(JetSpace::of(3).size(4), 35);
  EXPECT_EQ(JetSpace::of(4).size(4), kMaxCoeffs);
  const JetSpace& s = JetSpace::of(3);
  for (int i = 1; i < s.size(4); ++i) EXPECT_LE(s.degree(i - 1), s.degree(i));
  EXPECT_EQ(s.size(0), 1);
  EXPECT_EQ(s.size(1), 4);
}

TEST(Jet, PolynomialPartialsAreExact) {
  const JetSpace& s = JetSpace::of(2);
  const Jet x = var(s, 0, 1.5), y = var(s, 1, -0.5);
  const Jet f = x * x * y + 3.0 * y * y * y * y;  // x^2 y + 3 y^4
  EXPECT_DOUBLE_EQ(f.value(), 1.5 * 1.5 * -0.5 + 3 * std::pow(0.5, 4));
  EXPECT_DOUBLE_EQ(f.d(0), 2 * 1.5 * -0.5);
  EXPECT_DOUBLE_EQ(f.d(1), 1.5 * 1.5 + 12 * std::pow(-0.5, 3));
  EXPECT_DOUBLE_EQ(f.d(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(f.partial({0, 4, 0, 0}), 72.0);
  EXPECT_DOUBLE_EQ(f.partial({2, 1, 0, 0}), 2.0);
}

TEST(Jet, ElementaryFunctionsMatchClosedForms) {
  const JetSpace& s = JetSpace::of(1);
  const double x0 = 0.7;
  const Jet x = var(s, 0, x0);
  const Jet e = exp(sin(x));
  // d/dx e^{sin x} = cos x e^{sin x}; second: (cos^2 x - sin x) e^{sin x}
  const double es = std::exp(std::sin(x0));
  EXPECT_NEAR(e.d(0), std::cos(x0) * es, 1e-14);
  EXPECT_NEAR(e.d(0, 0), (std::cos(x0) * std::cos(x0) - std::sin(x0)) * es, 1e-14);
  const Jet l = log(x);
  EXPECT_NEAR(l.partial({4, 0, 0, 0}), -6.0 / std::pow(x0, 4), 1e-12);
  const Jet r = sqrt(x);
  EXPECT_NEAR(r.partial({3, 0, 0, 0}), 3.0 / 8.0 * std::pow(x0, -2.5), 1e-12);
  const Jet t = tan(x);
  EXPECT_NEAR(t.d(0), 1.0 / (std::cos(x0) * std::cos(x0)), 1e-13);
  const Jet th = tanh(x);
  EXPECT_NEAR(th.d(0), 1.0 - std::tanh(x0) * std::tanh(x0), 1e-14);
  const Jet q = 1.0 / x;
  EXPECT_NEAR(q.partial({4, 0, 0, 0}), 24.0 / std::pow(x0, 5), 1e-11);
  const Jet pw = pow(x, -3);
  EXPECT_NEAR(pw.d(0, 0), 12.0 * std::pow(x0, -5), 1e-11);
}

TEST(Jet, DerivativeLowersOrder) {
  const JetSpace& s = JetSpace::of(2);
  const Jet f = sin(var(s, 0, 0.3)) * cosh(var(s, 1, 0.2));
  const Jet fx = derivative(f, 0);
  EXPECT_EQ(fx.order(), kMaxOrder - 1);
  EXPECT_NEAR(fx.value(), f.d(0), 1e-15);
  EXPECT_NEAR(fx.d(1), f.d(0, 1), 1e-15);
  EXPECT_THROW(derivative(f.truncated(0), 0), std::out_of_range);
  EXPECT_THROW(fx.partial({4, 0, 0, 0}), std::out_of_range);
}

TEST(Expr, ParsesAndEvaluates) {
  const std::vector<std::string> names{"theta", "phi"};
  const Expr e = parse_expr("sin(theta)^2 + 2*phi - -1 + e^0", names);
  const double p[] = {0.4, 1.25};
  EXPECT_NEAR(e.eval(p), std::pow(std::sin(0.4), 2) + 2.5 + 2.0, 1e-15);
  const Expr r = parse_expr("2^3^2", names);
  EXPECT_NEAR(r.eval(p), 512.0, 1e-11);
  const Expr u = parse_expr("-theta^2", names);
  EXPECT_DOUBLE_EQ(u.eval(p), -0.16);
  EXPECT_DOUBLE_EQ(parse_expr("1.5e-1 * 2", names).eval(p), 0.3);
  EXPECT_DOUBLE_EQ(parse_expr("pi", names).eval(p), M_PI);
}

TEST(Expr, ParseErrorsAreReported) {
  const std::vector<std::string> names{"x"};
  EXPECT_THROW(parse_expr("x +", names), ParseError);
  EXPECT_THROW(parse_expr("y", names), ParseError);
  EXPECT_THROW(parse_expr("sin x", names), ParseError);
  EXPECT_THROW(parse_expr("(x", names), ParseError);
  EXPECT_THROW(parse_expr("x $ 2", names), ParseError);
}

TEST(Expr, SymbolicDiffAgreesWithJets) {
  const std::vector<std::string> names{"x", "y"};
  const Expr e = parse_expr("log(1 + x^2 + y^2) * exp(-y) / (2 + cos(x*y)) + sqrt(x)^3", names);
  const double p[] = {0.8, -0.3};
  const JetSpace& s = JetSpace::of(2);
  const Jet xs[] = {var(s, 0, p[0]), var(s, 1, p[1])};
  const Jet j = e.eval(std::span<const Jet>(xs));
  EXPECT_NEAR(e.eval(p), j.value(), 1e-15);
  EXPECT_NEAR(e.diff(0).eval(p), j.d(0), 1e-13);
  EXPECT_NEAR(e.diff(1).eval(p), j.d(1), 1e-13);
  EXPECT_NEAR(e.diff(0).diff(1).eval(p), j.d(0, 1), 1e-12);
  EXPECT_NEAR(e.diff(1).diff(1).diff(0).diff(0).eval(p), j.partial({2, 2, 0, 0}), 1e-10);
}

TEST(Expr, GeneralPowerUsesExpLog) {
  const std::vector<std::string> names{"x"};
  const Expr e = parse_expr("x^x", names);
  const double p[] = {1.3};
  EXPECT_NEAR(e.eval(p), std::pow(1.3, 1.3), 1e-14);
  EXPECT_NEAR(e.diff(0).eval(p), std::pow(1.3, 1.3) * (std::log(1.3) + 1.0), 1e-13);
}
