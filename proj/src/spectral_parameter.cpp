#include "dnls/spectral_parameter.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dnls {

SpectralParameter::SpectralParameter(double tau, int branch) : tau_(tau), branch_(branch) {
  if (!(std::abs(tau) >= 1.0))
    throw std::invalid_argument("spectral parameter below unit threshold: |tau| = " +
                                std::to_string(std::abs(tau)) + " < 1");
  if (branch != +1 && branch != -1)
    throw std::invalid_argument("spectral parameter branch must be +1 or -1");
}

std::complex<double> SpectralParameter::kappa() const {
  const double root = std::sqrt(std::abs(tau_));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  // exp(-i*sgn(tau)*pi/4) = (1 - i*sgn(tau))/sqrt(2)
  std::complex<double> unit(inv_sqrt2, -sign() * inv_sqrt2);
  return static_cast<double>(branch_) * root * unit;
}

}  // namespace dnls
