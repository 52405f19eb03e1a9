#pragma once

// Named soliton fixtures and the expression-file loader.
//
// Normalization: R_ij + nabla^2_ij f = (mu/n) g_ij for gradient instances and
// 2 R_ij + nabla_i w_j + nabla_j w_i = (2 mu / n) g_ij for 1-form instances,
// so the usual lambda g convention corresponds to lambda = mu / n.

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rw/geometry.hpp"

namespace rw {

enum class SolitonClass { Contracting, Steady, Expanding };

const char* to_string(SolitonClass c) noexcept;
SolitonClass class_of(double mu) noexcept;

struct SolitonInstance {
  std::string name;
  std::shared_ptr<const ChartMetric> metric;
  std::optional<Expr> potential;      // gradient instances
  std::optional<ExprTensor> one_form;  // general instances, (0,1)
  double mu = 0.0;
  SolitonClass cls = SolitonClass::Steady;
  bool trivial = false;
  // False for deliberate non-examples whose defining equation fails.
  bool expected_soliton = true;

  int dim() const noexcept { return metric->dim(); }
  bool is_gradient() const noexcept { return potential.has_value(); }
  // w = df for gradient instances, the stored form otherwise.
  ExprTensor omega() const;

  // Checks the structural invariants; raises Error on violation.
  void validate() const;
};

// Canonical registered names, in listing order.
std::vector<std::string> catalog_names();

// Accepts the canonical names plus gaussian_<n>_mu=<value>.
SolitonInstance catalog_get(std::string_view name);

// Charts usable by the geodesic tools: every instance name plus metric-only
// charts (ellipsoid).
std::shared_ptr<const ChartMetric> metric_get(std::string_view name);
std::vector<std::string> metric_only_names();

// The same instance with w = df stored as a 1-form.
SolitonInstance as_one_form(const SolitonInstance& s);

// Gradient: R_ij + nabla^2_ij f - (mu/n) g_ij.
// 1-form:   R_ij + (nabla_i w_j + nabla_j w_i)/2 - (mu/n) g_ij.
TensorValue soliton_residual(const SolitonInstance& s, std::span<const double> p,
                             DiffMode mode = DiffMode::Jet);
TensorValue soliton_residual(const SolitonInstance& s, const LocalGeometry& lg);

// Expression files; see docs/expression_files.md.
SolitonInstance parse_instance(std::string_view text, const std::string& origin = "<string>");
SolitonInstance load_instance_file(const std::filesystem::path& path);
ChartMetric parse_metric(std::string_view text, const std::string& origin = "<string>");

}  // namespace rw
