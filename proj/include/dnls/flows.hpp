#pragma once

#include <optional>
#include <vector>

#include "dnls/field.hpp"
#include "dnls/greens.hpp"
#include "dnls/invariants.hpp"
#include "dnls/spectral_parameter.hpp"

namespace dnls {

struct PairDerivative {
  ComplexField dq;
  ComplexField dr;
};

/// dq/dt = i q'' + (q^2 r)', dr/dt = -i r'' + (q r^2)', cubic terms dealiased.
PairDerivative dnls_rhs(const FieldPair& pair);

/// dq/dt = -h12'(kappa), dr/dt = -h21'(kappa) (branch-free). If warm is given
/// it seeds the fixed point; the computed triple is returned through triple_out.
PairDerivative akappa_rhs(const FieldPair& pair, const SpectralParameter& sp,
                          const DiagonalGreens* warm = nullptr,
                          DiagonalGreens* triple_out = nullptr);

enum class FlowKind { dnls, a_kappa };

struct Snapshot {
  double t = 0.0;
  FieldPair pair;
  double gauge_dev = 0.0;
  ConservedSet conserved;
};

struct Trajectory {
  FlowKind flow = FlowKind::dnls;
  std::optional<SpectralParameter> generator;
  double dt = 0.0;
  int stride = 1;
  double dealias_fraction = 2.0 / 3.0;
  std::vector<Snapshot> snaps;
};

struct EvolveOptions {
  int snapshot_stride = 10;
  std::vector<SpectralParameter> probe_taus;  // A(tau) recorded per snapshot
  bool record_conserved = true;
  double blowup_factor = 2.0;
  double fp_tol = 1e-13;  // fixed-point tolerance inside the A(kappa) flow
};

/// Integrating-factor RK4 in the spectral domain; the linear phases
/// exp(-/+ i xi^2 t) are removed exactly.
Trajectory dnls_evolve(const FieldPair& pair, double T, double dt,
                       const EvolveOptions& opts = {});

/// Explicit RK4; the Green's triple is recomputed at every stage, warm-started
/// from the previous stage.
Trajectory akappa_evolve(const FieldPair& pair, const SpectralParameter& sp, double T,
                         double dt, const EvolveOptions& opts = {});

/// Weak commutator residual max_phi ||dL/dt phi - [P, L] phi|| / ||phi|| over
/// random smooth test fields. generator is required for the A(kappa) flow.
double lax_residual(const FieldPair& pair, FlowKind flow, const SpectralParameter& probe,
                    const SpectralParameter* generator, int n_fields, unsigned seed);

struct DynamicsRow {
  double t = 0.0;
  double res_h12 = 0.0;
  double res_h21 = 0.0;
  double res_gamma = 0.0;
};

/// Centered time differences of the recomputed triple against the printed
/// evolution equations, per interior snapshot.
std::vector<DynamicsRow> greens_dynamics_check(const Trajectory& traj,
                                               const SpectralParameter& probe);

}  // namespace dnls
