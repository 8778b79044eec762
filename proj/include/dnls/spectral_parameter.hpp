#pragma once

#include <complex>

namespace dnls {

/// Real spectral parameter tau = i*kappa^2 with |tau| >= 1 plus a branch sign
/// selecting kappa among the two square roots of -i*tau.
///
/// The principal branch is kappa = |tau|^(1/2) * exp(-i*sgn(tau)*pi/4);
/// branch = -1 flips kappa's sign. kappa2() is exact: kappa2 = -i*tau.
class SpectralParameter {
 public:
  SpectralParameter(double tau, int branch = +1);

  double tau() const { return tau_; }
  int branch() const { return branch_; }
  /// sgn(i*kappa^2) = sgn(tau)
  int sign() const { return tau_ > 0.0 ? +1 : -1; }

  std::complex<double> kappa() const;
  std::complex<double> kappa2() const { return {0.0, -tau_}; }

  /// Same tau, kappa -> -kappa.
  SpectralParameter flipped() const { return SpectralParameter(tau_, -branch_); }
  /// The parameter whose kappa equals -conj(kappa): tau -> -tau, branch flipped.
  SpectralParameter neg_conj() const { return SpectralParameter(-tau_, -branch_); }

 private:
  double tau_;
  int branch_;
};

}  // namespace dnls
