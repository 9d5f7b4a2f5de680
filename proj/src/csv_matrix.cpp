#include "csv_matrix.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <sstream>

#include "uavsense/errors.hpp"

namespace uavsense::detail {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> to_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  // from_chars rejects a leading '+', strtod accepts it; normalise.
  const char* begin = cell.data() + (cell.front() == '+' ? 1 : 0);
  const char* end = cell.data() + cell.size();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

std::vector<std::vector<double>> read_numeric_csv(std::istream& in, const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    std::vector<double> row;
    row.reserve(cells.size());
    bool numeric = true;
    for (const auto& c : cells) {
      const auto v = to_number(c);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first_content) {
        first_content = false;
        continue;  // header
      }
      throw ParseError(what + ": line " + std::to_string(line_no) + ": non-numeric cell");
    }
    first_content = false;
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw ParseError(what + ": line " + std::to_string(line_no) + ": non-finite entry");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(what + ": line " + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace uavsense::detail
