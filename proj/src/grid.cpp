#include "osde/grid.hpp"

#include <stdexcept>

namespace osde {

std::vector<double> unit_grid(int size) {
  if (size < 2) throw std::invalid_argument("unit_grid: size must be >= 2");
  std::vector<double> grid(size);
  const double step = 1.0 / (size - 1);
  for (int i = 0; i < size; ++i) grid[i] = i * step;
  grid.back() = 1.0;
  return grid;
}

double trapezoid_unit(std::span<const double> values) {
  if (values.size() < 2)
    throw std::invalid_argument("trapezoid_unit: need at least 2 samples");
  double sum = 0.5 * (values.front() + values.back());
  for (size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum / static_cast<double>(values.size() - 1);
}

}  // namespace osde
