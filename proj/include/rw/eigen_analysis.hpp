#pragma once

// Pointwise Ricci eigenvalue analysis relative to the metric.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rw/catalog.hpp"
#include "rw/geometry.hpp"

namespace rw {

// Generalized symmetric eigenvalues of (A, g), ascending, via the congruence
// L^{-1} A L^{-T} with g = L L^T.
std::vector<double> generalized_eigenvalues(const TensorValue& a, const TensorValue& g);

// Position of a point relative to the equality cases of the eigenvalue
// inequality: lambda_min = 0 with the others equal, or all equal.
enum class Dichotomy { MinZeroOthersEqual, AllEqual, Neither };
const char* to_string(Dichotomy d) noexcept;

struct EigenGroup {
  double value;
  int multiplicity;
};

struct EigenEntry {
  std::vector<double> point;
  std::vector<double> eigenvalues;  // ascending
  std::vector<EigenGroup> groups;
  double scalar = 0.0;
  double ric_norm_sq = 0.0;
  double ratio = 0.0;  // lambda_min / R, NaN when R = 0
  double trace_error = 0.0;  // |sum lambda - R|
  Dichotomy dichotomy = Dichotomy::Neither;
};

EigenEntry ricci_eigen(const SolitonInstance& s, std::span<const double> p,
                       DiffMode mode = DiffMode::Jet, double group_tol = 1e-8);
EigenEntry ricci_eigen(const LocalGeometry& lg, double group_tol = 1e-8);

double eigen_polynomial(int n, double lambda, double R, double S);
double eigen_factored(int n, double lambda, double Rt, double St);

struct TrivialityResult {
  bool einstein = false;
  double max_tracefree = 0.0;
  // n = 2: the trace-free Ricci tensor vanishes identically, so the verdict
  // falls back to constancy of R over the sample.
  bool n2_fallback = false;
  double scalar_spread = 0.0;  // max R - min R over the sample
  int samples = 0;
};

TrivialityResult triviality_check(const SolitonInstance& s,
                                  const std::vector<std::vector<double>>& points,
                                  double tol = 1e-8, int threads = 1,
                                  DiffMode mode = DiffMode::Jet);

struct EigenPolyFuzz {
  int count = 0;
  double max_rel_deviation = 0.0;  // |poly - factored| / (1 + |poly|)
  int nonneg_tuples = 0;           // tuples with all eigenvalues >= 0 and R > 0
  double max_factored_nonneg = -1e300;
  int sign_violations = 0;         // factored > 1e-12 on those tuples
  std::string kernel;
  bool pass(double rel_tol = 1e-10) const {
    return max_rel_deviation <= rel_tol && sign_violations == 0;
  }
};

// count random tuples per family: n in {3,4,5}, eigenvalues uniform in
// [-10, 10]; a second family of count tuples draws eigenvalues from [0, 10].
EigenPolyFuzz eigen_poly_fuzz(int count, std::uint64_t seed);

}  // namespace rw
