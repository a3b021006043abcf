#include "osde/superpop.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace osde {

Superpopulation::Superpopulation(std::vector<GaussComponent> components)
    : components_(std::move(components)) {
  if (components_.empty())
    throw std::invalid_argument("superpopulation: needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight))
      throw std::invalid_argument("superpopulation: weights must be positive");
    if (!(c.variance > 0.0) || !std::isfinite(c.variance))
      throw std::invalid_argument("superpopulation: variances must be positive");
    if (!std::isfinite(c.mean))
      throw std::invalid_argument("superpopulation: means must be finite");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("superpopulation: weights must sum to 1");
}

Superpopulation Superpopulation::standard_normal() {
  return Superpopulation({{1.0, 0.0, 1.0}});
}

double Superpopulation::pdf(double x) const {
  double value = 0.0;
  for (const auto& c : components_) {
    const double z = x - c.mean;
    value += c.weight * std::exp(-z * z / (2.0 * c.variance)) /
             std::sqrt(2.0 * std::numbers::pi * c.variance);
  }
  return value;
}

double Superpopulation::cdf(double x) const {
  double value = 0.0;
  for (const auto& c : components_) {
    const double z = (x - c.mean) / std::sqrt(2.0 * c.variance);
    value += c.weight * 0.5 * std::erfc(-z);
  }
  return value;
}

double Superpopulation::mean() const {
  double value = 0.0;
  for (const auto& c : components_) value += c.weight * c.mean;
  return value;
}

std::vector<double> Superpopulation::sample(long long count,
                                            std::mt19937_64& rng) const {
  if (count < 1)
    throw std::invalid_argument("superpopulation: sample count must be >= 1");
  std::vector<double> weights;
  weights.reserve(components_.size());
  for (const auto& c : components_) weights.push_back(c.weight);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());

  std::vector<double> out(static_cast<size_t>(count));
  for (auto& value : out) {
    const auto& c = components_[pick(rng)];
    std::normal_distribution<double> normal(c.mean, std::sqrt(c.variance));
    value = normal(rng);
  }
  return out;
}

double true_density_on_unit(const Superpopulation& sp,
                            const ScalingTransform& scaling, double u) {
  if (u < -kDomainTol || u > 1.0 + kDomainTol)
    throw std::domain_error("true_density_on_unit: argument outside [0, 1]");
  if (!(scaling.width() > 0.0))
    throw std::invalid_argument("true_density_on_unit: degenerate scaling");
  return scaling.width() * sp.pdf(scaling.from_unit(u));
}

}  // namespace osde
