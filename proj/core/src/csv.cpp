#include "lupi_occ/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lupi_occ/errors.hpp"
#include "lupi_occ/io.hpp"

namespace lupi_occ {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t'; }

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (is_blank(s[b]) || s[b] == '\r')) ++b;
  while (e > b && (is_blank(s[e - 1]) || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

}  // namespace

CsvTable parse_csv(const std::string& text, char delimiter, bool has_header) {
  const bool whitespace = delimiter == ' ';
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool field_quoted = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&] {
    record.push_back(field_quoted ? field : trim(field));
    field.clear();
    field_started = false;
    field_quoted = false;
  };
  auto end_record = [&] {
    if (field_started || !record.empty()) end_field();
    const bool blank = record.empty() || (record.size() == 1 && record.front().empty());
    if (!blank) {
      if (has_header && table.header.empty() && table.rows.empty()) {
        table.header = std::move(record);
      } else {
        table.rows.push_back(std::move(record));
        table.line_numbers.push_back(record_line);
      }
    }
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '\n') {
      end_record();
      ++line;
      continue;
    }
    if (c == '\r') continue;
    if (whitespace && is_blank(c)) {
      if (field_started) end_field();
      continue;
    }
    if (record.empty() && !field_started) record_line = line;
    if (!whitespace && c == delimiter) {
      end_field();
    } else if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
      field_quoted = true;
    } else {
      field_started = true;
      field.push_back(c);
    }
  }
  if (in_quotes) throw FormatError("unterminated quoted field starting on line " +
                                   std::to_string(record_line));
  end_record();
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path, char delimiter, bool has_header) {
  return parse_csv(read_text_file(path), delimiter, has_header);
}

double parse_number(const std::string& cell, std::size_t line, std::size_t column) {
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (begin != end && *begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw FormatError("non-numeric value '" + cell + "' at line " + std::to_string(line) +
                      ", column " + std::to_string(column + 1));
  }
  return value;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string quote_csv_field(const std::string& field, char delimiter) {
  const bool needs = field.find_first_of(std::string("\"\n\r") + delimiter) != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace lupi_occ
