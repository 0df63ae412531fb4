#include "lupi_occ/datasets.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "lupi_occ/csv.hpp"
#include "lupi_occ/errors.hpp"

namespace lupi_occ {

namespace {

char sniff_delimiter(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return line.find(',') != std::string::npos ? ',' : ' ';
  }
  return ',';
}

int rings_to_int(const std::string& cell, std::size_t line, std::size_t col) {
  const double v = parse_number(cell, line, col);
  if (v != static_cast<int>(v)) {
    throw FormatError("non-integer ring count '" + cell + "' at line " + std::to_string(line));
  }
  return static_cast<int>(v);
}

}  // namespace

TabularDataset load_heart(const std::filesystem::path& path) {
  CsvSchema schema;
  schema.has_header = false;
  schema.delimiter = sniff_delimiter(path);
  schema.label_column = std::size_t{13};
  schema.feature_columns.emplace();
  for (std::size_t c = 0; c < 13; ++c) schema.feature_columns->push_back(c);
  TabularDataset ds = load_csv(path, schema);
  ds.name = "heart";
  ds.feature_names = {"age",
                      "sex",
                      "chest_pain",
                      "resting_blood_pressure",
                      "serum_cholesterol",
                      "fasting_blood_sugar",
                      "electrocardiographic",
                      "max_heart_rate",
                      "exercise_angina",
                      "oldpeak",
                      "slope",
                      "major_vessels",
                      "thal"};
  for (const auto& row : ds.rows) {
    if (row.label != 1 && row.label != 2) {
      throw FormatError("heart: class labels must be 1 or 2, found " + std::to_string(row.label));
    }
  }
  return ds;
}

std::vector<GroupAttribute> heart_group_attributes() {
  return {
      {"Age", GroupRule("age", {40.0, 50.0})},
      {"Electrocardiographic", GroupRule("electrocardiographic", {1.0, 2.0})},
      {"Sex", GroupRule("sex", {1.0})},
  };
}

int abalone_class_of_rings(int rings) noexcept {
  if (rings <= 8) return 1;
  if (rings <= 10) return 2;
  return 3;
}

TabularDataset load_abalone(const std::filesystem::path& path) {
  const CsvTable table = read_csv_file(path, sniff_delimiter(path), false);
  if (table.rows.empty()) throw FormatError("'" + path.string() + "': no data rows");

  TabularDataset ds;
  ds.name = "abalone";
  ds.feature_names = {"sex_m",    "sex_f",        "sex_i",          "length",
                      "diameter", "height",       "whole_weight",   "shucked_weight",
                      "viscera_weight", "shell_weight"};
  ds.rows.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    if (cells.size() != 9) {
      throw FormatError("malformed abalone row at line " + std::to_string(line) +
                        ": expected 9 fields, got " + std::to_string(cells.size()));
    }
    std::vector<double> v(3, 0.0);
    if (cells[0] == "M") v[0] = 1.0;
    else if (cells[0] == "F") v[1] = 1.0;
    else if (cells[0] == "I") v[2] = 1.0;
    else throw FormatError("unknown abalone sex '" + cells[0] + "' at line " + std::to_string(line));
    for (std::size_t c = 1; c < 8; ++c) v.push_back(parse_number(cells[c], line, c));
    ds.rows.push_back({Vector(std::move(v)), abalone_class_of_rings(rings_to_int(cells[8], line, 8))});
  }
  return ds;
}

std::vector<GroupAttribute> abalone_group_attributes() {
  return {
      {"Height", GroupRule("height", {0.15})},
      {"Length", GroupRule("length", {0.5})},
      {"Whole weight", GroupRule("whole_weight", {0.8})},
  };
}

OccTask load_mnist_task(const std::filesystem::path& features_path,
                        const std::filesystem::path& priv_path,
                        const std::filesystem::path& split_path, int target_class) {
  if (target_class != 1 && target_class != 2) {
    throw InputError("MNIST target class must be 1 (digit 5) or 2 (digit 8)");
  }

  const CsvTable features = read_csv_file(features_path, sniff_delimiter(features_path), false);
  if (features.rows.empty()) throw FormatError("'" + features_path.string() + "': no data rows");
  std::vector<Vector> images;
  std::vector<int> classes;
  for (std::size_t r = 0; r < features.rows.size(); ++r) {
    const auto& cells = features.rows[r];
    const std::size_t line = features.line_numbers[r];
    if (cells.size() != kMnistImageFeatures + 1) {
      throw FormatError("MNIST features line " + std::to_string(line) + ": expected " +
                        std::to_string(kMnistImageFeatures) + " features plus a label, got " +
                        std::to_string(cells.size()) + " fields");
    }
    std::vector<double> v;
    v.reserve(kMnistImageFeatures);
    for (std::size_t c = 0; c < kMnistImageFeatures; ++c) v.push_back(parse_number(cells[c], line, c));
    const double raw = parse_number(cells.back(), line, kMnistImageFeatures);
    int cls = 0;
    if (raw == 5.0 || raw == 1.0) cls = 1;
    else if (raw == 8.0 || raw == 2.0) cls = 2;
    else throw FormatError("MNIST label must be 5, 8, 1 or 2 at line " + std::to_string(line));
    images.emplace_back(std::move(v));
    classes.push_back(cls);
  }

  std::ifstream split_in(split_path);
  if (!split_in) throw IoError("cannot open '" + split_path.string() + "'");
  std::map<std::string, std::vector<std::size_t>> partitions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(split_in, line)) {
    ++line_no;
    for (char& c : line) {
      if (c == ',' || c == ':' || c == '\t' || c == '\r') c = ' ';
    }
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;
    auto& indices = partitions[name];
    std::string token;
    while (ls >> token) {
      const double v = parse_number(token, line_no, indices.size() + 1);
      if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)) ||
          static_cast<std::size_t>(v) >= images.size()) {
        throw FormatError("split file line " + std::to_string(line_no) + ": index '" + token +
                          "' is outside the " + std::to_string(images.size()) + " feature rows");
      }
      indices.push_back(static_cast<std::size_t>(v));
    }
  }
  for (const char* required : {"train", "test"}) {
    if (!partitions.contains(required)) {
      throw FormatError("split file has no '" + std::string(required) + "' partition");
    }
  }

  const CsvTable priv = read_csv_file(priv_path, sniff_delimiter(priv_path), false);
  const auto& train_idx = partitions.at("train");
  if (priv.rows.size() != train_idx.size()) {
    throw FormatError("privileged file has " + std::to_string(priv.rows.size()) +
                      " rows but the train partition has " + std::to_string(train_idx.size()) +
                      " images");
  }

  OccTask task;
  task.target_class = target_class;
  task.train_priv.emplace();
  for (std::size_t k = 0; k < train_idx.size(); ++k) {
    const auto& cells = priv.rows[k];
    if (cells.size() != kMnistPrivilegedFeatures) {
      throw FormatError("expected " + std::to_string(kMnistPrivilegedFeatures) +
                        " privileged features, got " + std::to_string(cells.size()) +
                        " on line " + std::to_string(priv.line_numbers[k]));
    }
    if (classes[train_idx[k]] != target_class) continue;
    std::vector<double> v;
    for (std::size_t c = 0; c < cells.size(); ++c) v.push_back(parse_number(cells[c], priv.line_numbers[k], c));
    task.train_target.push_back(images[train_idx[k]]);
    task.train_priv->emplace_back(std::move(v));
  }
  auto fill = [&](const std::vector<std::size_t>& idx, PointSet& points, std::vector<Label>& labels) {
    for (std::size_t i : idx) {
      points.push_back(images[i]);
      labels.push_back(classes[i] == target_class ? Label::Target : Label::Outlier);
    }
  };
  fill(partitions.at("test"), task.test_points, task.test_labels);
  if (partitions.contains("validation")) {
    fill(partitions.at("validation"), task.validation_points, task.validation_labels);
  }
  if (task.train_target.empty()) {
    throw InputError("MNIST train partition has no rows of class " + std::to_string(target_class));
  }
  return task;
}

}  // namespace lupi_occ
