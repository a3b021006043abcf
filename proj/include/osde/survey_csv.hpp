#pragma once

#include <string>
#include <vector>

namespace osde {

// Parsed survey observations. `weight` is filled with 1.0 when the file has
// no weight column; `stratum` is empty when absent.
struct SurveyData {
  std::vector<double> x;
  std::vector<double> weight;
  std::vector<int> stratum;
  bool has_weight = false;
  bool has_stratum = false;
};

// Reads a comma-separated file with a mandatory header row. Recognized
// columns: x (required), weight (> 0, finite), stratum (integer >= 0); other
// columns are ignored. Requires at least 2 data rows; ragged rows, empty
// cells, and non-finite numbers are errors (std::runtime_error).
SurveyData read_survey_csv(const std::string& path);

}  // namespace osde
