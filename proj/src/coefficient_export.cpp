#include "osde/coefficient_export.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace osde {

void CoefficientExport::validate() const {
  if (format_version != 1)
    throw std::invalid_argument("export: unsupported format_version");
  method_from_name(method);  // throws for unknown names
  if (N < 1 || n < 1 || n > N)
    throw std::invalid_argument("export: bad population/sample sizes");
  if (!std::isfinite(delta))
    throw std::invalid_argument("export: non-finite delta");
  if (J < 0 || static_cast<size_t>(J) != w.size())
    throw std::invalid_argument("export: weight vector length != J");
  if (theta.size() < static_cast<size_t>(2 * J) + 1)
    throw std::invalid_argument("export: theta needs at least 2J + 1 entries");
  for (double t : theta)
    if (!std::isfinite(t))
      throw std::invalid_argument("export: non-finite coefficient");
  for (double v : w)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("export: weight outside [0, 1]");
  if (!(scaling_b > scaling_a) || !std::isfinite(scaling_a) ||
      !std::isfinite(scaling_b))
    throw std::invalid_argument("export: degenerate scaling interval");
}

CoefficientExport make_export(const DensityEstimate& est) {
  CoefficientExport exp;
  exp.method = method_name(est.method);
  exp.N = est.coeffs.N;
  exp.n = est.coeffs.n;
  exp.delta = est.coeffs.delta;
  exp.J = est.J;
  exp.scaling_a = est.scaling.a;
  exp.scaling_b = est.scaling.b;
  exp.theta = est.coeffs.theta;
  exp.w = est.w;
  exp.validate();
  return exp;
}

DensityEstimate to_estimate(const CoefficientExport& exp) {
  exp.validate();
  DensityEstimate est;
  est.coeffs.theta = exp.theta;
  est.coeffs.N = exp.N;
  est.coeffs.n = static_cast<int>(exp.n);
  est.coeffs.delta = exp.delta;
  est.w = exp.w;
  est.J = exp.J;
  est.scaling = {exp.scaling_a, exp.scaling_b};
  est.method = method_from_name(exp.method);
  est.validate();
  return est;
}

std::string export_to_json(const CoefficientExport& exp) {
  nlohmann::json j;
  j["format_version"] = exp.format_version;
  j["method"] = exp.method;
  j["N"] = exp.N;
  j["n"] = exp.n;
  j["delta"] = exp.delta;
  j["J"] = exp.J;
  j["scaling"] = {{"a", exp.scaling_a}, {"b", exp.scaling_b}};
  j["theta"] = exp.theta;
  j["w"] = exp.w;
  return j.dump(2) + "\n";
}

CoefficientExport export_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("export: not valid JSON: ") +
                             e.what());
  }
  if (!j.is_object())
    throw std::runtime_error("export: top level must be an object");

  static constexpr std::array<const char*, 9> kKeys = {
      "format_version", "method", "N",     "n", "delta",
      "J",              "scaling", "theta", "w"};
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : kKeys) known = known || item.key() == key;
    if (!known)
      throw std::runtime_error("export: unknown key '" + item.key() + "'");
  }
  for (const char* key : kKeys)
    if (!j.contains(key))
      throw std::runtime_error(std::string("export: missing key '") + key +
                               "'");

  try {
    CoefficientExport exp;
    exp.format_version = j.at("format_version").get<int>();
    if (exp.format_version != 1)
      throw std::runtime_error("export: unsupported format_version");
    exp.method = j.at("method").get<std::string>();
    exp.N = j.at("N").get<long long>();
    exp.n = j.at("n").get<long long>();
    exp.delta = j.at("delta").get<double>();
    exp.J = j.at("J").get<int>();

    const auto& sc = j.at("scaling");
    if (!sc.is_object() || sc.size() != 2 || !sc.contains("a") ||
        !sc.contains("b"))
      throw std::runtime_error("export: scaling must hold exactly a and b");
    exp.scaling_a = sc.at("a").get<double>();
    exp.scaling_b = sc.at("b").get<double>();

    for (const char* key : {"theta", "w"}) {
      const auto& arr = j.at(key);
      if (!arr.is_array())
        throw std::runtime_error(std::string("export: ") + key +
                                 " must be an array");
      for (const auto& el : arr)
        if (!el.is_number())
          throw std::runtime_error(std::string("export: ") + key +
                                   " entries must be numbers");
    }
    exp.theta = j.at("theta").get<std::vector<double>>();
    exp.w = j.at("w").get<std::vector<double>>();

    try {
      exp.validate();
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(e.what());
    }
    return exp;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("export: bad field type: ") +
                             e.what());
  }
}

void write_export(const CoefficientExport& exp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export: cannot write " + path);
  out << export_to_json(exp);
  if (!out) throw std::runtime_error("export: failed writing " + path);
}

CoefficientExport read_export(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("export: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return export_from_json(ss.str());
}

}  // namespace osde
