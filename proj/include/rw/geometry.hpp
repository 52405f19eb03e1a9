#pragma once

// Curvature and covariant calculus of a coordinate-chart metric at a point.
//
// Conventions (asserted by the test suite):
//   Gamma^k_ij  = 1/2 g^{ks} (d_i g_sj + d_j g_si - d_s g_ij), stored (k, i, j)
//   R_ijl^m     = d_i Gamma^m_jl - d_j Gamma^m_il + Gamma^m_ip Gamma^p_jl - Gamma^m_jp Gamma^p_il
//   R_ijkl      = g_km R_ijl^m       (round sphere: g_ik g_jl - g_il g_jk)
//   R_ik        = g^{jl} R_ijkl
// With these, nabla^2_ij w_k - nabla^2_ji w_k = R_ijks w^s holds, and the
// Riemann tensor splits as
//   R_ijkl = -R/((n-1)(n-2)) (g_ik g_jl - g_il g_jk)
//            + 1/(n-2) (R_ik g_jl - R_il g_jk + R_jl g_ik - R_jk g_il) + W_ijkl.
// Covariant derivatives prepend their slot: (nabla T)_{a...} = nabla_a T_{...}.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rw/expr.hpp"
#include "rw/jet.hpp"
#include "rw/tensor.hpp"

namespace rw {

using JetTensor = BasicTensor<Jet>;
using ExprTensor = BasicTensor<Expr>;

struct Box {
  std::vector<double> lo, hi;

  int dim() const noexcept { return static_cast<int>(lo.size()); }
  bool contains(std::span<const double> p, double margin = 0.0) const;
  // Box shrunk by `margin` on every side.
  Box shrunk(double margin) const;
};

enum class DiffMode { Jet, FiniteDifference };

const char* to_string(DiffMode m) noexcept;

class ChartMetric {
 public:
  // `g` is a symmetric (0,2) block of component expressions in the chart
  // coordinates. `sample` defaults to `domain`; it is the region identity
  // checks draw points from and must lie inside `domain`.
  ChartMetric(std::string name, std::vector<std::string> coords, Box domain, ExprTensor g,
              std::optional<Box> sample = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  const std::vector<std::string>& coords() const noexcept { return coords_; }
  const Box& domain() const noexcept { return domain_; }
  const Box& sample_box() const noexcept { return sample_; }
  const ExprTensor& components() const noexcept { return g_; }

  // Raises OutOfDomain unless p lies in the domain with `margin` to spare.
  void require_inside(std::span<const double> p, double margin = 0.0) const;

  // Metric components at p; raises NonPositiveDefinite when g(p) is not SPD.
  TensorValue metric_at(std::span<const double> p) const;

 private:
  std::string name_;
  std::vector<std::string> coords_;
  Box domain_, sample_;
  ExprTensor g_;
};

// Taylor jet of a closed-form function at p up to `order`. In
// FiniteDifference mode only orders <= 2 are propagated exactly; orders 3
// and 4 come from 7-point sixth-order central differences of the exact second
// derivatives. Raises OutOfDomain if a stencil leaves `box`.
Jet expand(const Expr& e, std::span<const double> p, int order, DiffMode mode,
           const Box& box);
JetTensor expand(const ExprTensor& t, std::span<const double> p, int order, DiffMode mode,
                 const Box& box);

TensorValue value(const JetTensor& t);

// All local differential data of a chart metric at one point, represented as
// jets so that covariant derivatives of derived tensors stay exact.
// Valid jet orders: g, ginv 4; gamma 3; riemann, ricci, scalar 2.
class LocalGeometry {
 public:
  LocalGeometry(const ChartMetric& m, std::span<const double> p, DiffMode mode = DiffMode::Jet);

  const ChartMetric& chart() const noexcept { return *m_; }
  int dim() const noexcept { return m_->dim(); }
  std::span<const double> point() const noexcept { return p_; }
  DiffMode mode() const noexcept { return mode_; }
  const JetSpace& space() const noexcept { return JetSpace::of(dim()); }

  const JetTensor& g() const noexcept { return g_; }
  const JetTensor& ginv() const noexcept { return ginv_; }
  const JetTensor& gamma() const noexcept { return gamma_; }
  const JetTensor& riemann() const noexcept { return riemann_; }
  const JetTensor& ricci() const noexcept { return ricci_; }
  const Jet& scalar() const noexcept { return scalar_; }

  Jet expand(const Expr& f) const;
  JetTensor expand(const ExprTensor& t) const;
  Jet constant(double v) const;

  JetTensor nabla(const JetTensor& t) const;
  // Index gymnastics with the metric jets.
  JetTensor raise(const JetTensor& t, int slot) const;
  JetTensor lower(const JetTensor& t, int slot) const;
  // Contraction of slots a < b; uses g or g^{-1} when both have equal variance.
  JetTensor trace(const JetTensor& t, int a, int b) const;
  // <a, b>_g for two (0,1) fields.
  Jet dot(const JetTensor& a, const JetTensor& b) const;

  // Weyl tensor values (0 for n = 2, where the decomposition degenerates).
  TensorValue weyl() const;

 private:
  const ChartMetric* m_;
  std::vector<double> p_;
  DiffMode mode_;
  JetTensor g_, ginv_, gamma_, riemann_, ricci_;
  Jet scalar_;
};

struct CurvatureBundle {
  TensorValue metric, inverse_metric;  // (0,2), (2,0)
  TensorValue christoffel;             // (1,2)
  TensorValue riemann;                 // (0,4)
  TensorValue ricci;                   // (0,2)
  double scalar = 0.0;
  TensorValue weyl;                    // (0,4)
  TensorValue ric_sq;                  // (0,2) S_ik = R_ij g^{jl} R_lk
  double ric_norm_sq = 0.0;            // S = |Ric|^2
};

TensorValue christoffel(const ChartMetric& m, std::span<const double> p,
                        DiffMode mode = DiffMode::Jet);
CurvatureBundle curvature(const ChartMetric& m, std::span<const double> p,
                          DiffMode mode = DiffMode::Jet);
CurvatureBundle curvature(const LocalGeometry& lg);

// nabla of a closed-form tensor field; the new slot comes first.
TensorValue covariant_derivative(const ChartMetric& m, const ExprTensor& field,
                                 std::span<const double> p, DiffMode mode = DiffMode::Jet);
TensorValue hessian(const ChartMetric& m, const Expr& f, std::span<const double> p,
                    DiffMode mode = DiffMode::Jet);
double laplacian_scalar(const ChartMetric& m, const Expr& f, std::span<const double> p,
                        DiffMode mode = DiffMode::Jet);
// Rough Laplacian g^{ab} nabla_a nabla_b T_ik of a (0,2) field.
TensorValue laplacian_tensor2(const ChartMetric& m, const ExprTensor& t,
                              std::span<const double> p, DiffMode mode = DiffMode::Jet);
// (div Ric)_i = g^{jk} nabla_k R_ij.
TensorValue divergence_ric(const ChartMetric& m, std::span<const double> p,
                           DiffMode mode = DiffMode::Jet);

// Max absolute component in a g-orthonormal frame, at metric value g.
double frame_norm(const TensorValue& t, const TensorValue& g);

// Lower Cholesky factor of an SPD block; raises NonPositiveDefinite.
std::vector<double> cholesky(const TensorValue& g);

}  // namespace rw
