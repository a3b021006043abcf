#pragma once

#include <span>
#include <vector>

namespace osde {

// Uniform grid on [0, 1] with both endpoints included. Requires size >= 2.
std::vector<double> unit_grid(int size);

// Trapezoid integral over [0, 1] of values sampled on unit_grid(values.size()).
double trapezoid_unit(std::span<const double> values);

}  // namespace osde
