#pragma once

#include <Eigen/Dense>

#include <vector>

#include "dnls/field.hpp"
#include "dnls/greens.hpp"
#include "dnls/spectral_parameter.hpp"

namespace dnls {

struct ConservedSet {
  cdouble mass{0.0, 0.0};      // M = integral q r
  cdouble hamiltonian{0.0, 0.0};  // H = integral -i q r' + q^2 r^2 / 2
  cdouble energy{0.0, 0.0};    // E = integral q'r' - (3/2) i q^2 r r' + q^3 r^3 / 2
  std::vector<std::pair<SpectralParameter, cdouble>> a_values;
};

/// M, H and E by spectral derivatives and uniform quadrature.
ConservedSet conserved_polynomials(const FieldPair& pair);

/// rho = -(q h21 + r h12) / (2 + gamma); rejects |2+gamma| < 0.5.
ComplexField rho_density(const DiagonalGreens& dg, const FieldPair& pair);

/// A as the quadrature of the density.
cdouble a_from_density(const ComplexField& rho);

/// Dense discretization of (d+tau)^{-1} kappa q (d-tau)^{-1} kappa r.
///
/// The matrix is the discrete circulant-resolvent composition; the slowly
/// decaying UV tails of tr K and tr K^2 (the discrete mode sum misses an
/// O(tau/xi_max) fraction of them) are corrected analytically at build time
/// by closed-form one-loop frequency integrals.
class TraceKernel {
 public:
  static TraceKernel build(const FieldPair& pair, const SpectralParameter& sp, int n_small);

  const Eigen::MatrixXcd& matrix() const { return k_; }
  const SpectralParameter& sp() const { return sp_; }
  int size() const { return static_cast<int>(k_.rows()); }
  double spectral_radius_estimate() const { return radius_; }
  cdouble tr_m1_exact() const { return tr1_exact_; }
  cdouble tr_m2_exact() const { return tr2_exact_; }
  cdouble tr_m1_discrete() const { return tr1_disc_; }
  cdouble tr_m2_discrete() const { return tr2_disc_; }

 private:
  Eigen::MatrixXcd k_;
  SpectralParameter sp_{2.0};
  double radius_ = 0.0;
  cdouble tr1_exact_{0.0, 0.0}, tr2_exact_{0.0, 0.0};
  cdouble tr1_disc_{0.0, 0.0}, tr2_disc_{0.0, 0.0};
};

struct TraceSeries {
  cdouble value{0.0, 0.0};
  std::vector<cdouble> terms;         // A_m = -sgn/m tr K^m (m = 1, 2 UV-exact)
  std::vector<cdouble> partial_sums;
};

/// A by the trace series up to m_max; rejects spectral radius >= 1.
TraceSeries a_trace_series(const TraceKernel& kern, int m_max);

/// A = sgn(tau) log det(I - K), UV-corrected at orders 1 and 2; the imaginary
/// part is unwound by continuity along an amplitude homotopy theta^2 K.
cdouble a_trace_logdet(const TraceKernel& kern);

struct GradientCheck {
  double err_q = 0.0;  // relative error of the q-direction pairing
  double err_r = 0.0;
};

/// Central finite differences of A(q, r) against the closed-form functional
/// derivatives dA/dq = -kappa g21, dA/dr = -kappa g12 (independent fields;
/// the gauge is not re-imposed after perturbing).
GradientCheck functional_derivative_check(const FieldPair& pair, const SpectralParameter& sp,
                                          const ComplexField& direction, double eps);

/// {A(kappa), A(varkappa)} = integral h12(a) h21'(b) + h21(a) h12'(b) dx.
cdouble poisson_bracket_a(const FieldPair& pair, const SpectralParameter& sp_a,
                          const SpectralParameter& sp_b);

struct AsymptoticsRow {
  double tau = 0.0;
  double rem1 = 0.0, rem2 = 0.0, rem3 = 0.0;  // |A| expansion remainders
  double rem_gamma = 0.0;                      // sup remainder after two gamma terms
  double rem_kg12 = 0.0, rem_kg21 = 0.0;       // sup remainders of -kappa g12/g21
};

struct AsymptoticsTable {
  std::vector<AsymptoticsRow> rows;
  double slope1 = 0.0, slope2 = 0.0, slope3 = 0.0;
  double slope_gamma = 0.0, slope_kg12 = 0.0, slope_kg21 = 0.0;
};

AsymptoticsTable asymptotic_compare(const FieldPair& pair, const std::vector<double>& taus);

struct HsNorms {
  double hs_half = 0.0;  // || (d+ik^2)^{-1/2} kq (d-ik^2)^{-1/2} ||_{I2}
  double hs_s = 0.0;     // || (d+ik^2)^{s-1/2} kq (d-ik^2)^{-1/2} ||_{I2}
};

/// Hilbert-Schmidt norms by the direct double frequency sum.
HsNorms hs_norm_lambda(const FieldPair& pair, const SpectralParameter& sp, double s);

/// Least-squares slope of log|y| against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dnls
