#include "osde/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace osde {

double phi(int j, double u) {
  if (j < 0) throw std::invalid_argument("phi: basis index must be >= 0");
  if (u < -kDomainTol || u > 1.0 + kDomainTol)
    throw std::domain_error("phi: argument outside [0, 1]");
  if (j == 0) return 1.0;
  return std::numbers::sqrt2 * std::cos(std::numbers::pi * j * u);
}

ScalingTransform fit_scaling(std::span<const double> values, double margin) {
  if (values.empty())
    throw std::invalid_argument("fit_scaling: no values to scale");
  if (!(margin >= 0.0))
    throw std::invalid_argument("fit_scaling: margin must be >= 0");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("fit_scaling: non-finite value");
  const double range = hi - lo;
  if (!(range > 0.0))
    throw std::invalid_argument("fit_scaling: degenerate spread (all values equal)");
  return {lo - margin * range, hi + margin * range};
}

}  // namespace osde
