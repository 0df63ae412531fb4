#pragma once

// Minimal RFC-4180 reader/writer: quoted fields with doubled quotes, optional
// header row, configurable delimiter. A space delimiter means "split on runs
// of blanks", which is how the UCI .dat files are laid out.

#include <filesystem>
#include <string>
#include <vector>

namespace lupi_occ {

struct CsvTable {
  std::vector<std::string> header;             // empty when the file has none
  std::vector<std::vector<std::string>> rows;  // data rows, blank lines dropped
  std::vector<std::size_t> line_numbers;       // 1-based source line of each row
};

CsvTable parse_csv(const std::string& text, char delimiter, bool has_header);
CsvTable read_csv_file(const std::filesystem::path& path, char delimiter, bool has_header);

// Parses a decimal number with no surrounding junk; throws FormatError with
// the given coordinates otherwise. line is 1-based, column 0-based (reported
// 1-based).
double parse_number(const std::string& cell, std::size_t line, std::size_t column);

// Shortest decimal text that parses back to exactly the same double.
std::string format_number(double value);

std::string quote_csv_field(const std::string& field, char delimiter);

}  // namespace lupi_occ
