#include "osde/survey_csv.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace osde {

namespace {

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cells;
  size_t start = 0;
  for (;;) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

[[noreturn]] void fail(const std::string& what, size_t row) {
  throw std::runtime_error("survey csv, data row " + std::to_string(row) +
                           ": " + what);
}

double parse_finite(const std::string& cell, const char* column, size_t row) {
  if (cell.empty()) fail(std::string("empty ") + column + " cell", row);
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + cell.size())
    fail(std::string("cannot parse ") + column + " value '" + cell + "'", row);
  if (!std::isfinite(v))
    fail(std::string(column) + " value is not finite", row);
  return v;
}

int parse_stratum(const std::string& cell, size_t row) {
  if (cell.empty()) fail("empty stratum cell", row);
  const char* begin = cell.c_str();
  char* end = nullptr;
  const long long v = std::strtoll(begin, &end, 10);
  if (end != begin + cell.size())
    fail("stratum '" + cell + "' is not an integer", row);
  if (v < 0 || v > std::numeric_limits<int>::max())
    fail("stratum label outside [0, INT_MAX]", row);
  return static_cast<int>(v);
}

}  // namespace

SurveyData read_survey_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("survey csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("survey csv: empty file " + path);
  const auto header = split_csv_line(line);

  constexpr size_t kAbsent = static_cast<size_t>(-1);
  size_t x_col = kAbsent, weight_col = kAbsent, stratum_col = kAbsent;
  for (size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "x" && x_col == kAbsent) x_col = c;
    if (header[c] == "weight" && weight_col == kAbsent) weight_col = c;
    if (header[c] == "stratum" && stratum_col == kAbsent) stratum_col = c;
  }
  if (x_col == kAbsent)
    throw std::runtime_error("survey csv: header has no 'x' column");

  SurveyData data;
  data.has_weight = weight_col != kAbsent;
  data.has_stratum = stratum_col != kAbsent;

  size_t row = 0;
  while (std::getline(in, line)) {
    const auto cells = split_csv_line(line);
    if (cells.size() == 1 && cells[0].empty()) continue;  // blank line
    ++row;
    if (cells.size() != header.size())
      fail("expected " + std::to_string(header.size()) + " cells, found " +
               std::to_string(cells.size()),
           row);
    data.x.push_back(parse_finite(cells[x_col], "x", row));
    if (data.has_weight) {
      const double w = parse_finite(cells[weight_col], "weight", row);
      if (!(w > 0.0)) fail("weight must be > 0", row);
      data.weight.push_back(w);
    } else {
      data.weight.push_back(1.0);
    }
    if (data.has_stratum)
      data.stratum.push_back(parse_stratum(cells[stratum_col], row));
  }

  if (data.x.size() < 2)
    throw std::runtime_error("survey csv: needs at least 2 data rows");
  return data;
}

}  // namespace osde
