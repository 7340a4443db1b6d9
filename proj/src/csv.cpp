#include "capire/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "capire/errors.hpp"

namespace capire::csv {

namespace {

std::vector<std::string> split_line(std::string_view line, const std::string& location) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw InputError(location, "unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw InputError(source + ":1", "missing column '" + std::string(name) + "'");
}

std::string Table::location(std::size_t row) const {
  return source + ":" + std::to_string(lines.at(row));
}

Table parse(std::string_view text, std::string source) {
  Table table;
  table.source = std::move(source);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::string location = table.source + ":" + std::to_string(line_no);
    auto fields = split_line(line, location);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != table.header.size()) {
        throw InputError(location, "expected " + std::to_string(table.header.size()) +
                                       " fields, found " + std::to_string(fields.size()));
      }
      table.rows.push_back(std::move(fields));
      table.lines.push_back(line_no);
    }
    if (end == text.size()) break;
  }
  if (!have_header) throw InputError(table.source, "empty file (header row required)");
  return table;
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

void require_header(const Table& table, const std::vector<std::string>& expected) {
  if (table.header != expected) {
    throw InputError(table.source + ":1", "unexpected header, expected '" + join(expected) + "'");
  }
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string out(buf);
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

double parse_double(std::string_view text, const std::string& location) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw InputError(location, "invalid number '" + std::string(text) + "'");
  }
  return v;
}

long long parse_int(std::string_view text, const std::string& location) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw InputError(location, "invalid integer '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace capire::csv
