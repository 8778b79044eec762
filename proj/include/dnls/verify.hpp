#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dnls/field.hpp"
#include "dnls/flows.hpp"
#include "dnls/greens.hpp"
#include "dnls/invariants.hpp"

namespace dnls {

enum class FluxKind { dnls_flux, a_flux, gamma_flux };

struct FluxRecord {
  FluxKind kind = FluxKind::dnls_flux;
  ComplexField j;
  double tau_probe = 0.0;
  double tau_generator = 0.0;  // 0 when not applicable
  cdouble theta{0.0, 0.0};
  cdouble xi{0.0, 0.0};
};

/// j = i(q' h21 - r' h12)/(2+gamma) - tau q r + 2 i tau rho - q r rho.
FluxRecord flux_dnls(const FieldPair& pair, const DiagonalGreens& dg);

/// j_A = -Theta [g12(k)g21(v) + g12(v)g21(k)] / (2+gamma(v)) - (Xi/2) gamma(k).
FluxRecord flux_a(const DiagonalGreens& dg_probe, const DiagonalGreens& dg_gen);

/// j_gamma = -k^3(k^2+v^2)/(k^2-v^2)^2 [g12(k)g21(v)+g21(k)g12(v)]
///           - k^4 v/(k^2-v^2)^2 (gamma(k)+1)(gamma(v)+1).
FluxRecord flux_gamma(const DiagonalGreens& dg_probe, const DiagonalGreens& dg_gen);

/// Density of the un-normalized gamma-law: 2 i vk gamma(v) - (q g21(v) + r g12(v)).
ComplexField gamma_law_density(const FieldPair& pair, const DiagonalGreens& dg_probe);

struct ContinuityResult {
  std::vector<double> times;        // interior snapshot times
  std::vector<double> l2_residuals; // || centered d_t density + d_x flux ||_L2
  double integral_drift = 0.0;      // relative drift of the density integral
};

/// Centered time differences of the density against the spectral divergence of
/// the flux at the midpoint state. The flux kind must match the trajectory's flow.
ContinuityResult continuity_residual(const Trajectory& traj, FluxKind kind,
                                     const SpectralParameter& probe);

struct CheckRow {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<CheckRow> rows;
  void add(const std::string& name, double residual, double tolerance);
  bool all_pass() const;
};

using ToleranceMap = std::map<std::string, double>;

/// Default tolerances for every named check.
const ToleranceMap& default_tolerances();

/// Residual table for the algebraic identities at two spectral parameters:
/// quadratic identity, the three ODE identities, the -conj(kappa) symmetry,
/// the two-parameter commutativity identity, the series-remainder
/// decomposition, and the dA/dtau bookkeeping (finite differences in tau).
VerificationReport identity_suite(const FieldPair& pair, const SpectralParameter& sp_a,
                                  const SpectralParameter& sp_b,
                                  const ToleranceMap& tol = default_tolerances());

struct SweepRow {
  std::string estimate;
  double amplitude = 0.0;
  double tau = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool valid = false;  // false for degenerate 0/0 rows
};

struct SweepTable {
  std::vector<SweepRow> rows;
  /// max/median of the valid ratios of one estimate id.
  double max_over_median(const std::string& estimate) const;
  std::vector<std::string> estimate_ids() const;
};

/// Norm-ratio sweep for the mapping estimates and the Hilbert-Schmidt bounds.
SweepTable estimate_sweep(const std::vector<ProfileSpec>& family,
                          const std::vector<double>& taus, double s, const GridPtr& grid);

}  // namespace dnls
