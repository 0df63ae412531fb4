#include "lupi_occ/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lupi_occ/errors.hpp"
#include "lupi_occ/io.hpp"

namespace lupi_occ {

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "lupi_occ-report";
constexpr int kFormatVersion = 1;

std::string fixed1(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", percent);
  return buf;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? " " + s : std::string(width - s.size(), ' ') + s;
}

json fold_to_json(const FoldResult& f) {
  return {{"fold", f.fold},
          {"sigma", f.params.sigma},
          {"c", f.params.c},
          {"mu", f.params.mu},
          {"eta", f.params.eta},
          {"validation_precision", f.validation_precision},
          {"skipped_singular", f.skipped_singular},
          {"selection_rank", f.selection_rank},
          {"true_positives", f.test.true_positives},
          {"false_positives", f.test.false_positives},
          {"false_negatives", f.test.false_negatives},
          {"precision", 100.0 * f.test.precision},
          {"recall", 100.0 * f.test.recall},
          {"f1", 100.0 * f.test.f1}};
}

FoldResult fold_from_json(const json& j) {
  FoldResult f;
  f.fold = j.at("fold").get<std::size_t>();
  f.params.sigma = j.at("sigma").get<double>();
  f.params.c = j.at("c").get<double>();
  f.params.mu = j.at("mu").get<double>();
  f.params.eta = j.at("eta").get<double>();
  f.validation_precision = j.at("validation_precision").get<double>();
  f.skipped_singular = j.at("skipped_singular").get<std::size_t>();
  f.selection_rank = j.at("selection_rank").get<std::size_t>();
  f.test.true_positives = j.at("true_positives").get<std::size_t>();
  f.test.false_positives = j.at("false_positives").get<std::size_t>();
  f.test.false_negatives = j.at("false_negatives").get<std::size_t>();
  f.test.precision = j.at("precision").get<double>() / 100.0;
  f.test.recall = j.at("recall").get<double>() / 100.0;
  f.test.f1 = j.at("f1").get<double>() / 100.0;
  return f;
}

// Rows sharing a dataset and group attribute, in first-seen order.
struct RowGroup {
  std::string dataset;
  std::string group_attribute;
  std::vector<const EvalReport*> rows;
};

std::vector<RowGroup> group_rows(const ReportSet& set) {
  std::vector<RowGroup> groups;
  for (const auto& r : set.reports) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const RowGroup& g) {
      return g.dataset == r.dataset && g.group_attribute == r.group_attribute;
    });
    if (it == groups.end()) {
      groups.push_back({r.dataset, r.group_attribute, {}});
      it = groups.end() - 1;
    }
    it->rows.push_back(&r);
  }
  return groups;
}

std::vector<Method> methods_in(const ReportSet& set) {
  std::vector<Method> methods;
  for (const auto& r : set.reports) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
  }
  std::sort(methods.begin(), methods.end());
  return methods;
}

}  // namespace

std::string format_percent(double fraction) { return fixed1(100.0 * fraction); }

std::string render_json(const ReportSet& set) {
  json rows = json::array();
  for (const auto& r : set.reports) {
    json folds = json::array();
    for (const auto& f : r.folds) folds.push_back(fold_to_json(f));
    rows.push_back({{"dataset", r.dataset},
                    {"target_class", r.target_class},
                    {"group_attribute", r.group_attribute},
                    {"method", display_name(r.method)},
                    {"seed", r.seed},
                    {"average_precision", r.average_precision()},
                    {"average_recall", r.average_recall()},
                    {"average_f1", r.average_f1()},
                    {"folds", folds}});
  }
  const json doc = {{"format", kFormatTag},
                    {"version", kFormatVersion},
                    {"library_version", LUPI_OCC_VERSION},
                    {"dataset", set.dataset},
                    {"seed", set.seed},
                    {"folds", set.folds},
                    {"rows", rows}};
  return doc.dump(2) + "\n";
}

ReportSet parse_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != kFormatTag) {
      throw FormatError("report parse error: not a lupi_occ report");
    }
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw FormatError("report parse error: unsupported version");
    }
    ReportSet set;
    set.dataset = doc.at("dataset").get<std::string>();
    set.seed = doc.at("seed").get<std::uint64_t>();
    set.folds = doc.at("folds").get<std::size_t>();
    for (const auto& row : doc.at("rows")) {
      EvalReport r;
      r.dataset = row.at("dataset").get<std::string>();
      r.target_class = row.at("target_class").get<int>();
      r.group_attribute = row.at("group_attribute").get<std::string>();
      r.method = parse_method(row.at("method").get<std::string>());
      r.seed = row.at("seed").get<std::uint64_t>();
      for (const auto& f : row.at("folds")) r.folds.push_back(fold_from_json(f));
      set.reports.push_back(std::move(r));
    }
    return set;
  } catch (const json::exception& e) {
    throw FormatError(std::string("report parse error: ") + e.what());
  } catch (const InputError& e) {
    throw FormatError(std::string("report parse error: ") + e.what());
  }
}

std::string render_fold_table(const ReportSet& set) {
  std::size_t folds = set.folds;
  for (const auto& r : set.reports) folds = std::max(folds, r.folds.size());

  constexpr std::size_t kName = 14;
  constexpr std::size_t kMethod = 8;
  constexpr std::size_t kCell = 9;
  std::ostringstream out;
  out << "Precision (%) per fold, " << set.dataset << ", seed " << set.seed << "\n";
  out << pad_right("Dataset", kName) << pad_right("Method", kMethod);
  for (std::size_t f = 1; f <= folds; ++f) out << pad_left("Fold-" + std::to_string(f), kCell);
  out << pad_left("Average", kCell) << "\n";

  for (const auto& g : group_rows(set)) {
    out << pad_right(g.dataset, kName) << "Group attribute = " << g.group_attribute << "\n";
    for (const EvalReport* r : g.rows) {
      out << pad_right("", kName) << pad_right(display_name(r->method), kMethod);
      for (std::size_t f = 0; f < folds; ++f) {
        out << pad_left(f < r->folds.size() ? format_percent(r->folds[f].test.precision) : "-",
                        kCell);
      }
      out << pad_left(fixed1(r->average_precision()), kCell) << "\n";
    }
  }
  return out.str();
}

std::string render_summary_table(const ReportSet& set) {
  const auto methods = methods_in(set);
  constexpr std::size_t kName = 14;
  constexpr std::size_t kAttr = 24;
  constexpr std::size_t kCell = 9;
  std::ostringstream out;
  out << "Average precision (%), " << set.dataset << ", seed " << set.seed << "\n";
  out << pad_right("Dataset", kName) << pad_right("Group attribute", kAttr);
  for (Method m : methods) out << pad_left(display_name(m), kCell);
  out << "\n";
  for (const auto& g : group_rows(set)) {
    out << pad_right(g.dataset, kName) << pad_right(g.group_attribute, kAttr);
    for (Method m : methods) {
      const auto it = std::find_if(g.rows.begin(), g.rows.end(),
                                   [&](const EvalReport* r) { return r->method == m; });
      out << pad_left(it == g.rows.end() ? "-" : fixed1((*it)->average_precision()), kCell);
    }
    out << "\n";
  }
  return out.str();
}

void write_report(const ReportSet& set, const std::filesystem::path& stem) {
  std::filesystem::path json_path = stem;
  json_path += ".json";
  std::filesystem::path text_path = stem;
  text_path += ".txt";
  write_text_file_atomic(json_path, render_json(set));
  write_text_file_atomic(text_path, render_fold_table(set) + "\n" + render_summary_table(set));
}

}  // namespace lupi_occ
