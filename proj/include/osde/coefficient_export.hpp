#pragma once

#include <string>
#include <vector>

#include "osde/estimator.hpp"

namespace osde {

// Serializable snapshot of a fitted estimate. Contains coefficients and
// weights only — never raw observations.
struct CoefficientExport {
  int format_version = 1;
  std::string method;
  long long N = 0;
  long long n = 0;
  double delta = 0.0;
  int J = 0;
  double scaling_a = 0.0;
  double scaling_b = 1.0;
  std::vector<double> theta;  // j = 0..j_max (>= 2J)
  std::vector<double> w;      // j = 1..J

  void validate() const;  // throws std::invalid_argument on inconsistency
};

CoefficientExport make_export(const DensityEstimate& est);
DensityEstimate to_estimate(const CoefficientExport& exp);

// JSON layout: {"format_version","method","N","n","delta","J",
// "scaling":{"a","b"},"theta":[...],"w":[...]}. Doubles are written with
// shortest round-trip precision, so write -> read is bit-exact. The reader is
// strict: unknown or missing keys and any format_version other than 1 are
// errors (std::runtime_error).
std::string export_to_json(const CoefficientExport& exp);
CoefficientExport export_from_json(const std::string& text);

void write_export(const CoefficientExport& exp, const std::string& path);
CoefficientExport read_export(const std::string& path);

}  // namespace osde
