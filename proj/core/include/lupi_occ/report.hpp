#pragma once

// Experiment reports: a machine-readable JSON document and human-readable
// fixed-column tables. Both are deterministic functions of their input.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lupi_occ/experiment.hpp"

namespace lupi_occ {

struct ReportSet {
  std::string dataset;
  std::uint64_t seed = 0;
  std::size_t folds = 0;
  std::vector<EvalReport> reports;
};

std::string render_json(const ReportSet& set);
// Throws FormatError on malformed input.
ReportSet parse_json(const std::string& text);

// Per-fold precision for every (dataset, group attribute, method) row.
std::string render_fold_table(const ReportSet& set);
// Average precision with one column per method.
std::string render_summary_table(const ReportSet& set);

// Writes <stem>.json and <stem>.txt (fold table followed by the summary).
void write_report(const ReportSet& set, const std::filesystem::path& stem);

// Score formatted in percent with one decimal, e.g. 0.8421 -> "84.2".
std::string format_percent(double fraction);

}  // namespace lupi_occ
