#pragma once

// Residuals of the differential identities satisfied by (gradient) Ricci
// solitons, evaluated pointwise and aggregated over sample sets.
//
//   I1  R + Laplace f - mu
//   I2  nabla_i R - 2 R_ij nabla^j f
//   I3  nabla_j R_ik - nabla_i R_jk - R_ijks nabla^s f
//   I4  R + |grad f|^2 - (2mu/n) f  is constant (residual: |value - sample mean|)
//   I5  Laplace R - <grad R, grad f> - (2mu/n) R + 2 |Ric|^2
//   I6  Laplace R_ik - <grad R_ik, grad f> - (2mu/n) R_ik + 2 R_ijkl R^{jl}
//   I7  I6 with the Riemann term split into Weyl, Ricci and scalar parts:
//       Laplace R_ik - <grad R_ik, grad f> - (2mu/n) R_ik + 2 W_ijkl R^{jl}
//         - 2/((n-1)(n-2)) (R^2 g_ik - n R R_ik + 2(n-1) S_ik - (n-1) S g_ik)
//       (the Weyl term is dropped for n = 3)
//   I8  2 div Ric - dR                                              (n > 2)
//   I9  W trace-free; W = 0 for n = 3; R_ijkl = R/2 (g_ik g_jl - g_il g_jk) for n = 2
//   I10 nabla^2_ij w_k - nabla^2_ji w_k - R_ijks w^s on fixed test forms
//   I11 n = 2: nabla^2 f - (mu - R)/2 g,  grad R - R grad f,
//       Laplace R - <grad R, grad f> - mu R + R^2
//   I12 g^{kj} nabla_k [2 (R_ij + nabla^2_ij f - mu g_ij / n) e^{-f}]
//         - nabla_i (R + 2 Laplace f - |grad f|^2 + 2 mu f / n) e^{-f}   (any f)
//   I13 Laplace R - <grad R, w> - (2mu/n) R + 2 S
//   I14 eigenvalue polynomial minus its factored form, relative, on Ricci data
//
// I12, I9 and I10 hold for every metric; the rest only on solitons.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rw/catalog.hpp"
#include "rw/geometry.hpp"

namespace rw {

enum class IdentityId { I1 = 1, I2, I3, I4, I5, I6, I7, I8, I9, I10, I11, I12, I13, I14 };

inline constexpr int kIdentityCount = 14;

std::string to_string(IdentityId id);
IdentityId parse_identity(std::string_view tag);  // "I5" or "5"; raises UnknownName
const char* describe(IdentityId id) noexcept;
std::vector<IdentityId> all_identities();

bool admissible(IdentityId id, const SolitonInstance& s);
std::vector<IdentityId> admissible_identities(const SolitonInstance& s);

double default_tolerance(IdentityId id, DiffMode mode);

struct IdentityReport {
  IdentityId identity = IdentityId::I1;
  std::string instance;
  int samples = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::vector<double> worst_point;
  double tolerance = 0.0;
  bool pass = false;
  // I4 only: statistics of the conserved quantity itself.
  std::optional<double> value_mean, value_std;
  // Set when evaluation raised instead of producing residuals.
  std::optional<std::string> error;
};

// Residual (frame norm) of one identity at one point. For I4 this is the
// conserved quantity's value, not a residual.
double identity_value(IdentityId id, const SolitonInstance& s, const LocalGeometry& lg);

IdentityReport check_identity(IdentityId id, const SolitonInstance& s,
                              const std::vector<std::vector<double>>& points, double tol,
                              DiffMode mode = DiffMode::Jet, int threads = 1);

struct SuiteConfig {
  int samples = 200;
  std::uint64_t seed = 1;
  DiffMode mode = DiffMode::Jet;
  int threads = 1;
  // Overrides the mode-dependent default for every identity.
  std::optional<double> tolerance;
  std::map<IdentityId, double> per_identity_tol;
  std::optional<IdentityId> only;
};

double tolerance_for(IdentityId id, const SuiteConfig& cfg);

// Every admissible identity (or just cfg.only), on one shared sample set.
// Per-identity failures are recorded in the report instead of aborting.
std::vector<IdentityReport> run_suite(const SolitonInstance& s, const SuiteConfig& cfg);

// A deterministic smooth 1-form used by I10; index in [0, 3).
ExprTensor test_one_form(int dim, int index);

// Frame norm of nabla_i nabla_j w_k - nabla_j nabla_i w_k - R_ijks w^s for a
// closed-form (0,1) field w.
double interchange_residual(const LocalGeometry& lg, const ExprTensor& w);

}  // namespace rw
