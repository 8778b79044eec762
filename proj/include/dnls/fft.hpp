#pragma once

#include <complex>
#include <vector>

namespace dnls {

using cdouble = std::complex<double>;

/// Unnormalized forward DFT (exponent -2*pi*i*jk/N), any power-of-two length.
std::vector<cdouble> fft(const std::vector<cdouble>& in);

/// Inverse DFT including the 1/N normalization factor.
std::vector<cdouble> ifft(const std::vector<cdouble>& in);

}  // namespace dnls
