#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "osde/basis.hpp"

namespace osde {

struct GaussComponent {
  double weight = 1.0;
  double mean = 0.0;
  double variance = 1.0;
};

// Finite Gaussian mixture acting as the superpopulation model.
class Superpopulation {
 public:
  // Throws std::invalid_argument unless weights are positive and sum to 1
  // within 1e-9 and every variance is positive.
  explicit Superpopulation(std::vector<GaussComponent> components);

  static Superpopulation standard_normal();

  const std::vector<GaussComponent>& components() const { return components_; }

  double pdf(double x) const;
  double cdf(double x) const;
  double mean() const;

  // N i.i.d. draws: mixture component by weight, then the component normal.
  std::vector<double> sample(long long count, std::mt19937_64& rng) const;

 private:
  std::vector<GaussComponent> components_;
};

// Density of the scaled variable U = (X - a)/(b - a) at u in [0, 1]:
// (b - a) * f(a + (b - a) u). Throws std::domain_error for u outside [0, 1].
double true_density_on_unit(const Superpopulation& sp,
                            const ScalingTransform& scaling, double u);

}  // namespace osde
