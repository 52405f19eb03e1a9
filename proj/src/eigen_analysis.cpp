#include "rw/eigen_analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rw/kernels/kernels.hpp"
#include "rw/parallel.hpp"

namespace rw {

std::vector<double> generalized_eigenvalues(const TensorValue& a, const TensorValue& g) {
  const int n = g.dim();
  const std::vector<double> Lv = cholesky(g);
  Eigen::MatrixXd L(n, n), A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      L(i, j) = Lv[i * n + j];
      A(i, j) = 0.5 * (a(i, j) + a(j, i));
    }
  const auto tri = L.triangularView<Eigen::Lower>();
  Eigen::MatrixXd B = tri.solve(A);
  B = tri.solve(B.transpose()).transpose();
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end());
  return ev;
}

const char* to_string(Dichotomy d) noexcept {
  switch (d) {
    case Dichotomy::MinZeroOthersEqual: return "min-zero-others-equal";
    case Dichotomy::AllEqual: return "all-equal";
    case Dichotomy::Neither: return "neither";
  }
  return "?";
}

EigenEntry ricci_eigen(const LocalGeometry& lg, double group_tol) {
  const CurvatureBundle c = curvature(lg);
  EigenEntry e;
  e.point.assign(lg.point().begin(), lg.point().end());
  e.eigenvalues = generalized_eigenvalues(c.ricci, c.metric);
  e.scalar = c.scalar;
  e.ric_norm_sq = c.ric_norm_sq;
  double s = 0;
  for (double v : e.eigenvalues) s += v;
  e.trace_error = std::abs(s - c.scalar);
  e.ratio = c.scalar != 0.0 ? e.eigenvalues.front() / c.scalar
                            : std::numeric_limits<double>::quiet_NaN();
  const double scale = std::max(1.0, std::abs(e.eigenvalues.back()));
  for (double v : e.eigenvalues) {
    if (!e.groups.empty() && std::abs(v - e.groups.back().value) <= group_tol * scale)
      ++e.groups.back().multiplicity;
    else
      e.groups.push_back({v, 1});
  }
  if (e.groups.size() == 1) {
    e.dichotomy = Dichotomy::AllEqual;
  } else if (std::abs(e.eigenvalues.front()) <= group_tol * scale && e.groups.size() == 2 &&
             e.groups.front().multiplicity == 1) {
    e.dichotomy = Dichotomy::MinZeroOthersEqual;
  }
  return e;
}

EigenEntry ricci_eigen(const SolitonInstance& s, std::span<const double> p, DiffMode mode,
                       double group_tol) {
  return ricci_eigen(LocalGeometry(*s.metric, p, mode), group_tol);
}

double eigen_polynomial(int n, double l, double R, double S) {
  return R * R * R - n * l * R * R + 2.0 * (n - 1) * l * l * R - (n - 1.0) * S * R +
         (n - 1.0) * (n - 2.0) * l * S;
}

double eigen_factored(int n, double l, double Rt, double St) {
  return (n - 2.0) * l * l * ((n - 1.0) * l - Rt) +
         ((n - 3.0) * l - Rt) * ((n - 1.0) * St - Rt * Rt);
}

TrivialityResult triviality_check(const SolitonInstance& s,
                                  const std::vector<std::vector<double>>& points, double tol,
                                  int threads, DiffMode mode) {
  const int n = s.dim();
  std::vector<double> tf(points.size()), R(points.size());
  parallel_for(points.size(), threads, [&](std::size_t k) {
    const CurvatureBundle c = curvature(*s.metric, points[k], mode);
    TensorValue t = c.ricci;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t(i, j) -= c.scalar / n * c.metric(i, j);
    tf[k] = frame_norm(t, c.metric);
    R[k] = c.scalar;
  });
  TrivialityResult r;
  r.samples = static_cast<int>(points.size());
  for (double v : tf) r.max_tracefree = std::max(r.max_tracefree, v);
  if (!R.empty()) {
    const auto [lo, hi] = std::minmax_element(R.begin(), R.end());
    r.scalar_spread = *hi - *lo;
  }
  r.n2_fallback = n == 2;
  r.einstein = r.n2_fallback ? r.scalar_spread <= tol : r.max_tracefree <= tol;
  return r;
}

EigenPolyFuzz eigen_poly_fuzz(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(3, 5);
  const auto& K = kernels::active();
  EigenPolyFuzz out;
  out.kernel = K.name;
  for (int family = 0; family < 2; ++family) {
    std::uniform_real_distribution<double> ev(family == 0 ? -10.0 : 0.0, 10.0);
    std::vector<double> nn(count), lam(count), R(count), S(count), Rt(count), St(count);
    for (int t = 0; t < count; ++t) {
      const int n = dim(rng);
      double e[5];
      for (int i = 0; i < n; ++i) e[i] = ev(rng);
      std::sort(e, e + n);
      double r = 0, s = 0, rt = 0, st = 0;
      for (int i = 0; i < n; ++i) {
        r += e[i];
        s += e[i] * e[i];
        if (i > 0) {
          rt += e[i];
          st += e[i] * e[i];
        }
      }
      nn[t] = n;
      lam[t] = e[0];
      R[t] = r;
      S[t] = s;
      Rt[t] = rt;
      St[t] = st;
    }
    std::vector<double> poly(count), fact(count);
    K.eigen_poly(nn.data(), lam.data(), R.data(), S.data(), poly.data(), count);
    K.eigen_factored(nn.data(), lam.data(), Rt.data(), St.data(), fact.data(), count);
    for (int t = 0; t < count; ++t) {
      out.max_rel_deviation =
          std::max(out.max_rel_deviation, std::abs(poly[t] - fact[t]) / (1.0 + std::abs(poly[t])));
      if (lam[t] >= 0.0 && R[t] > 0.0) {
        ++out.nonneg_tuples;
        out.max_factored_nonneg = std::max(out.max_factored_nonneg, fact[t]);
        if (fact[t] > 1e-12) ++out.sign_violations;
      }
    }
    out.count += count;
  }
  return out;
}

}  // namespace rw
