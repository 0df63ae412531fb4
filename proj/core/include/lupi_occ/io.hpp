#pragma once

// Whole-file text I/O.

#include <filesystem>
#include <string>

namespace lupi_occ {

// Throws IoError when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over path, so readers
// never observe a partially written file. Throws IoError on failure.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace lupi_occ
