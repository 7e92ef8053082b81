#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dermveil {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);
double parse_number(std::string_view text, std::string_view context);
long long parse_integer(std::string_view text, std::string_view context);

/// Minimal comma-separated table: a header row and string cells. Quoting is
/// not supported; cells must not contain commas or newlines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index of `name`; throws Schema when missing.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, std::string_view source);
std::string join_csv_row(const std::vector<std::string>& cells);

}  // namespace dermveil
