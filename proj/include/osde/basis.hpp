#pragma once

#include <span>

namespace osde {

// Tolerance for accepting arguments just outside [0, 1] (FP noise from scaling).
inline constexpr double kDomainTol = 1e-12;

// Cosine basis on [0, 1]: phi(0, u) = 1, phi(j, u) = sqrt(2) cos(pi j u).
// Throws std::invalid_argument for j < 0, std::domain_error for u outside
// [0, 1] beyond kDomainTol.
double phi(int j, double u);

// Affine map between an observation interval [a, b] and the unit interval.
struct ScalingTransform {
  double a = 0.0;
  double b = 1.0;

  double to_unit(double x) const { return (x - a) / (b - a); }
  double from_unit(double u) const { return a + (b - a) * u; }
  double width() const { return b - a; }
};

// Fits [a, b] = [min - margin*range, max + margin*range] over the values.
// Throws std::invalid_argument on an empty span, a negative margin, or a
// degenerate spread (all values equal).
ScalingTransform fit_scaling(std::span<const double> values, double margin = 0.0);

}  // namespace osde
