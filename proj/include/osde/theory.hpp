#pragma once

namespace osde {

// Sobolev-type smoothness class parameters: k derivatives, ball radius Q,
// variance scale b, coefficient-decay constant c (theta_j^2 ~ c j^-2(k+1)).
struct SobolevParams {
  int k = 1;
  double Q = 1.0;
  double b = 2.0;
  double c = 1.0;

  void validate() const;  // k >= 1, Q > 0, b > 0, c > 0
};

// Rate constant P(k, Q, b) = Q^{1/(2k+1)} {k/(pi (k+1) b)}^{2k/(2k+1)}.
double minimax_constant(const SobolevParams& p);

// Lower bound N^{-2k/(2k+1)} P(k, Q, b) on the MISE over the class.
double minimax_lower_bound(const SobolevParams& p, long long N);

// H1 = b^{-1/(2k+1)} ((2k+1)/((2k+2)c))^{-1/(2k+1)}, H2 = b^{2k/(2k+1)} (same
// second factor); H2/H1 = b identically.
double h1_constant(const SobolevParams& p);
double h2_constant(const SobolevParams& p);

// Rate-optimal truncation J ~ N^{1/(2k+1)} H1 (returned as a real).
double optimal_J_theory(const SobolevParams& p, long long N);

// Best achievable MISE ~ N^{-2k/(2k+1)} H2 for the truncated estimator.
double mise_min_theory(const SobolevParams& p, long long N);

}  // namespace osde
