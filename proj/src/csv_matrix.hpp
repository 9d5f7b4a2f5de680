#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uavsense::detail {

/// Parses a numeric CSV matrix. A first row containing any non-numeric cell
/// is treated as a header and skipped. Throws ParseError on ragged rows,
/// unparsable cells or non-finite values.
std::vector<std::vector<double>> read_numeric_csv(std::istream& in, const std::string& what);

}  // namespace uavsense::detail
