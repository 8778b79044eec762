#pragma once

#include <optional>
#include <string>

#include "dnls/field.hpp"
#include "dnls/spectral_parameter.hpp"

namespace dnls {

/// Diagonal Green's function triple of the Lax operator at one spectral
/// parameter. The stored fields gamma, h12 = kappa*g12 and h21 = kappa*g21
/// are branch-free; g12()/g21() divide by the parameter's kappa.
struct DiagonalGreens {
  SpectralParameter sp{1.0};
  ComplexField gamma;
  ComplexField h12;
  ComplexField h21;
  std::string method;

  int iterations = 0;           // fixed_point
  double rho_id_residual = 0.0; // fixed_point: independent check of gamma' = 2(q h21 - r h12)
  cdouble wronskian{0.0, 0.0};  // jost
  double wronskian_drift = 0.0; // jost: max |W(x) - W(0)|

  ComplexField g12() const;
  ComplexField g21() const;
};

struct FixedPointOptions {
  double tol = 1e-13;   // sup-norm change between sweeps; <= 0 iterates to stagnation
  int max_iter = 200;
  const DiagonalGreens* warm_start = nullptr;
};

/// Small-data fixed point: h12 <- -(2tau+d)^{-1}[kappa^2 q (1+gamma)],
/// h21 <- -(2tau-d)^{-1}[kappa^2 r (1+gamma)], gamma <- -2(i/tau) h12 h21 - gamma^2/2.
/// Throws on ||q||_L2 > 0.5 and on divergence, naming the offending norm.
DiagonalGreens greens_fixed_point(const FieldPair& pair, const SpectralParameter& sp,
                                  const FixedPointOptions& opts = {});

/// Dense 2N x 2N discretization of the Lax operator; inverts it and reads the
/// kernel diagonal with the orders <= 3 of the Neumann series telescoped
/// against quadrature-exact counterparts (the raw spectral diagonal converges
/// only like 1/xi_max across the kernel jump).
DiagonalGreens greens_dense_oracle(const FieldPair& pair, const SpectralParameter& sp,
                                   int n_small);

struct JostOptions {
  double target_step = 0.005;   // RK4 substep for the ray integration
  double wronskian_min = 1e-8;
};

/// Builds the kernel diagonal from the two solution rays of psi' = M psi that
/// decay at x -> +inf and x -> -inf, matched by the unit jump on the diagonal.
DiagonalGreens greens_jost(const FieldPair& pair, const SpectralParameter& sp,
                           const JostOptions& opts = {});

/// Explicit low-order series terms (multiplier compositions, as printed).
struct SeriesTerms {
  ComplexField g12_1, g12_3;
  ComplexField g21_1, g21_3;
  ComplexField gamma_2, gamma_4;
};

SeriesTerms series_terms(const FieldPair& pair, const SpectralParameter& sp);

/// g12/(2+gamma), g21/(2+gamma) and the >=3 remainder of the first ratio:
/// (g12/(2+gamma))^[>=3] = g12^[>=3]/2 - g12*gamma/(2(2+gamma)).
struct ComboRatio {
  ComplexField ratio12;
  ComplexField ratio21;
  ComplexField remainder12_geq3;
};

ComboRatio combo_ratio(const DiagonalGreens& dg, const FieldPair& pair);

/// Max sup-distance of the triples (gamma, h12, h21); grids may nest 2^k : 1.
double triple_distance(const DiagonalGreens& a, const DiagonalGreens& b);

}  // namespace dnls
