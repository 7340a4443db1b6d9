#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace capire::csv {

/// Parsed delimited text: a header and data rows, each tagged with its
/// 1-based source line for diagnostics.
struct Table {
  std::string source;  // file name used in error locations
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;

  /// Index of `name` in the header; throws InputError when absent.
  std::size_t column(std::string_view name) const;
  std::string location(std::size_t row) const;
};

/// Comma-separated, optional double-quote quoting, blank lines skipped.
/// Every row must have the header's width.
Table parse(std::string_view text, std::string source);
Table read_file(const std::string& path);

/// Requires the header to equal `expected` exactly (column order included).
void require_header(const Table& table, const std::vector<std::string>& expected);

std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);
/// Fixed-point rendering with `decimals` digits; -0 is printed as 0.
std::string fixed(double value, int decimals = 6);

double parse_double(std::string_view text, const std::string& location);
long long parse_int(std::string_view text, const std::string& location);

}  // namespace capire::csv
