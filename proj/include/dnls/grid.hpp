#pragma once

#include <memory>
#include <vector>

namespace dnls {

/// Uniform periodic grid on [-L, L) with power-of-two size.
///
/// Frequencies are stored in FFT order: xi[j] = pi*k/L with k = j for
/// j < N/2 and k = j - N otherwise, i.e. k in [-N/2, N/2).
struct Grid {
  double half_length = 0.0;  // L
  int size = 0;              // N
  double spacing = 0.0;      // h = 2L/N
  std::vector<double> x;     // x_j = -L + j*h
  std::vector<double> xi;    // FFT-ordered frequencies
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds a grid; rejects non-positive L and N that is not a power of two >= 16.
GridPtr make_grid(double half_length, int size);

bool same_grid(const GridPtr& a, const GridPtr& b);

}  // namespace dnls
