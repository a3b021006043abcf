#include "osde/theory.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace osde {

void SobolevParams::validate() const {
  if (k < 1) throw std::invalid_argument("theory: k must be >= 1");
  if (!(Q > 0.0) || !std::isfinite(Q))
    throw std::invalid_argument("theory: Q must be positive");
  if (!(b > 0.0) || !std::isfinite(b))
    throw std::invalid_argument("theory: b must be positive");
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("theory: c must be positive");
}

// The closed forms are evaluated in long double so the returned doubles are
// correctly rounded (the CLI prints them with shortest round-trip precision).
namespace {

long double rate_exponent(int k) {
  return 2.0L * k / (2.0L * k + 1.0L);
}

void check_population(long long N) {
  if (N < 1) throw std::invalid_argument("theory: N must be >= 1");
}

// Shared second factor ((2k+1)/((2k+2)c))^{-1/(2k+1)} of H1 and H2.
long double h_shared_factor(const SobolevParams& p) {
  const long double e = 2.0L * p.k + 1.0L;
  const long double inner = (2.0L * p.k + 1.0L) / ((2.0L * p.k + 2.0L) * p.c);
  return std::pow(inner, -1.0L / e);
}

long double minimax_constant_ld(const SobolevParams& p) {
  const long double e = 2.0L * p.k + 1.0L;
  const long double ratio =
      p.k / (std::numbers::pi_v<long double> * (p.k + 1.0L) * p.b);
  return std::pow(static_cast<long double>(p.Q), 1.0L / e) *
         std::pow(ratio, rate_exponent(p.k));
}

}  // namespace

double minimax_constant(const SobolevParams& p) {
  p.validate();
  return static_cast<double>(minimax_constant_ld(p));
}

double minimax_lower_bound(const SobolevParams& p, long long N) {
  p.validate();
  check_population(N);
  return static_cast<double>(
      std::pow(static_cast<long double>(N), -rate_exponent(p.k)) *
      minimax_constant_ld(p));
}

double h1_constant(const SobolevParams& p) {
  p.validate();
  return static_cast<double>(
      std::pow(static_cast<long double>(p.b), -1.0L / (2.0L * p.k + 1.0L)) *
      h_shared_factor(p));
}

double h2_constant(const SobolevParams& p) {
  p.validate();
  return static_cast<double>(
      std::pow(static_cast<long double>(p.b), rate_exponent(p.k)) *
      h_shared_factor(p));
}

double optimal_J_theory(const SobolevParams& p, long long N) {
  p.validate();
  check_population(N);
  return static_cast<double>(
      std::pow(static_cast<long double>(N), 1.0L / (2.0L * p.k + 1.0L)) *
      std::pow(static_cast<long double>(p.b), -1.0L / (2.0L * p.k + 1.0L)) *
      h_shared_factor(p));
}

double mise_min_theory(const SobolevParams& p, long long N) {
  p.validate();
  check_population(N);
  return static_cast<double>(
      std::pow(static_cast<long double>(N), -rate_exponent(p.k)) *
      std::pow(static_cast<long double>(p.b), rate_exponent(p.k)) *
      h_shared_factor(p));
}

}  // namespace osde
