#pragma once

// Constrained minimization of
//   F(u) = int R u^2 + 4 |grad u|^2 - (2 mu / n) u^2 log u^2 dV,  int u^2 dV = 1
// on a flat periodic grid, with spectral (FFT) derivatives.
//
// Critical points satisfy Delta u = R u / 4 + C u - (mu/n) u log u, and with
// f = -2 log u the expression E = R + 2 Delta f - |grad f|^2 + 2 mu f / n
// equals -4 C at every node.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "rw/expr.hpp"

namespace rw {

class PeriodicGrid {
 public:
  // n in [1, 4], m >= 8 and even, every side length > 0; raises Error.
  PeriodicGrid(int n, int m, std::vector<double> sides);

  int dim() const noexcept { return n_; }
  int points_per_axis() const noexcept { return m_; }
  const std::vector<double>& sides() const noexcept { return sides_; }
  std::size_t size() const noexcept { return size_; }
  // Quadrature weight of one node; weights sum to the volume.
  double weight() const noexcept { return weight_; }
  double volume() const noexcept { return volume_; }
  // Coordinate of node `node` (row-major, last axis fastest) along `axis`.
  double coordinate(std::size_t node, int axis) const;

 private:
  int n_, m_;
  std::vector<double> sides_;
  std::size_t size_;
  double weight_, volume_;
};

struct DiscreteField {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

DiscreteField constant_field(const PeriodicGrid& g, double v);
// e evaluated at the nodes; variables 0..n-1 are the grid coordinates.
DiscreteField sample_field(const PeriodicGrid& g, const Expr& e);

// Exact spectral operators on trigonometric interpolants. The Laplacian keeps
// the Nyquist mode; first derivatives zero it (its derivative is not real).
DiscreteField discrete_laplacian(const PeriodicGrid& g, const DiscreteField& u);
DiscreteField discrete_gradient(const PeriodicGrid& g, const DiscreteField& u, int axis);

// sum_i w v_i over the grid, pairwise summed.
double integrate(const PeriodicGrid& g, const DiscreteField& v);

// Raises ShapeMismatch; NotNormalized unless |int u^2 - 1| <= 1e-12.
double functional_eval(const PeriodicGrid& g, const DiscreteField& u, double mu,
                       const DiscreteField& R);

// int u^2 log u^2 with 0 log 0 = 0.
double entropy(const PeriodicGrid& g, const DiscreteField& u);

// F(u) >= R_min - (2 mu / n) log(m^n / Vol) for every normalized grid field:
// the gradient term is nonnegative and int u^2 log u^2 <= log(m^n / Vol).
double grid_lower_bound(const PeriodicGrid& g, double mu, const DiscreteField& R);

enum class InitKind { Constant, Random };

struct MinimizeConfig {
  int max_iter = 20000;
  double tolerance = 1e-10;  // on el_residual (sup norm)
  double armijo = 1e-4;
  double min_step = 1e-14;
  // Shift of the preconditioner (8 (-Delta) + shift)^{-1}.
  double precond_shift = 1.0;
  InitKind init = InitKind::Constant;
  std::uint64_t seed = 1;
  double init_amplitude = 0.5;  // Random: u = 1 + a * U(-1, 1), then normalized
  std::optional<DiscreteField> initial;  // overrides init
  bool keep_history = false;
};

struct MinimizeResult {
  DiscreteField u;
  double sigma = 0.0;        // F(u)
  double el_constant = 0.0;  // least-squares C
  double el_residual = 0.0;  // sup |Delta u - R u/4 - C u + (mu/n) u log u|
  int iterations = 0;
  bool converged = false;
  double u_min = 0.0, u_max = 0.0;
  // Invariants checked on every accepted iterate.
  bool monotone = true;
  bool jensen_holds = true;
  bool lower_bound_holds = true;
  double lower_bound = 0.0;
  std::vector<double> sigma_history, residual_history;  // when keep_history
};

struct ElState {
  double constant = 0.0;
  double residual = 0.0;
};

// C by least squares and the EL residual for a normalized field.
ElState euler_lagrange(const PeriodicGrid& g, const DiscreteField& u, double mu,
                       const DiscreteField& R);

// Raises NegativeMu for mu <= 0, ShapeMismatch.
MinimizeResult minimize(const PeriodicGrid& g, double mu, const DiscreteField& R,
                        const MinimizeConfig& cfg = {});

struct RecoveredExpression {
  DiscreteField f;
  DiscreteField expression;  // E at every node
  double expr_mean = 0.0;
  double expr_std = 0.0;
  double minus_4c = 0.0;
};

// f = -2 log u and E from spectral derivatives of f. Does not require
// convergence, so that non-critical fields can be compared; raises
// NonPositiveField when some u <= 0.
RecoveredExpression recover_f_check(const PeriodicGrid& g, const MinimizeResult& r, double mu,
                                    const DiscreteField& R);

}  // namespace rw
