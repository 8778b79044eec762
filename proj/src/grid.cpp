#include "dnls/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dnls {

GridPtr make_grid(double half_length, int size) {
  if (!(half_length > 0.0))
    throw std::invalid_argument("make_grid: half length must be positive, got " +
                                std::to_string(half_length));
  if (size < 16 || (size & (size - 1)) != 0)
    throw std::invalid_argument("make_grid: size must be a power of two >= 16, got " +
                                std::to_string(size));
  auto g = std::make_shared<Grid>();
  g->half_length = half_length;
  g->size = size;
  g->spacing = 2.0 * half_length / size;
  g->x.resize(size);
  g->xi.resize(size);
  const double pi_over_l = M_PI / half_length;
  for (int j = 0; j < size; ++j) {
    g->x[j] = -half_length + j * g->spacing;
    const int k = (j < size / 2) ? j : j - size;
    g->xi[j] = pi_over_l * k;
  }
  return g;
}

bool same_grid(const GridPtr& a, const GridPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->size == b->size && a->half_length == b->half_length;
}

}  // namespace dnls
