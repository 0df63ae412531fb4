#include "lupi_occ/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "lupi_occ/csv.hpp"
#include "lupi_occ/errors.hpp"

namespace lupi_occ {

namespace {

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t range) {
  // Rejection sampling keeps the draw unbiased and platform independent.
  const std::uint64_t limit = rng.max() - (rng.max() % range);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % range;
}

std::vector<std::vector<std::size_t>> chunk(const std::vector<std::size_t>& order, std::size_t k) {
  std::vector<std::vector<std::size_t>> parts(k);
  const std::size_t base = order.size() / k;
  const std::size_t extra = order.size() % k;
  std::size_t offset = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    parts[f].assign(order.begin() + static_cast<std::ptrdiff_t>(offset),
                    order.begin() + static_cast<std::ptrdiff_t>(offset + size));
    offset += size;
  }
  return parts;
}

std::vector<Fold> folds_from_parts(std::vector<std::vector<std::size_t>> parts, std::size_t n) {
  std::vector<Fold> folds;
  folds.reserve(parts.size());
  for (auto& test : parts) {
    std::sort(test.begin(), test.end());
    std::vector<bool> in_test(n, false);
    for (std::size_t i : test) in_test[i] = true;
    Fold fold;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_test[i]) fold.train.push_back(i);
    }
    fold.test = std::move(test);
    folds.push_back(std::move(fold));
  }
  return folds;
}

std::size_t resolve_column(const ColumnRef& ref, const std::vector<std::string>& header,
                           std::size_t width) {
  if (const auto* index = std::get_if<std::size_t>(&ref)) {
    if (*index >= width) {
      throw FormatError("column index " + std::to_string(*index) + " is out of range (" +
                        std::to_string(width) + " columns)");
    }
    return *index;
  }
  const auto& name = std::get<std::string>(ref);
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw FormatError("column '" + name + "' not found in header");
  return static_cast<std::size_t>(it - header.begin());
}

int parse_label(const std::string& cell, std::size_t line, std::size_t column) {
  const double v = parse_number(cell, line, column);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw FormatError("non-integer class label '" + cell + "' at line " + std::to_string(line));
  }
  return static_cast<int>(v);
}

}  // namespace

// ---------------------------------------------------------------- datasets

std::vector<int> TabularDataset::distinct_labels() const {
  std::set<int> labels;
  for (const auto& row : rows) labels.insert(row.label);
  return {labels.begin(), labels.end()};
}

std::size_t TabularDataset::feature_index(std::string_view feature) const {
  const auto it = std::find(feature_names.begin(), feature_names.end(), feature);
  if (it == feature_names.end()) {
    throw InputError("dataset '" + name + "' has no feature named '" + std::string(feature) + "'");
  }
  return static_cast<std::size_t>(it - feature_names.begin());
}

TabularDataset TabularDataset::subset(std::span<const std::size_t> indices) const {
  TabularDataset out{name, feature_names, {}};
  out.rows.reserve(indices.size());
  for (std::size_t i : indices) out.rows.push_back(rows.at(i));
  return out;
}

TabularDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  const CsvTable table = read_csv_file(path, schema.delimiter, schema.has_header);
  if (table.rows.empty()) throw FormatError("'" + path.string() + "': no data rows");

  const std::size_t width = schema.has_header ? table.header.size() : table.rows.front().size();
  const std::size_t label_col = resolve_column(schema.label_column, table.header, width);

  std::vector<std::size_t> feature_cols;
  if (schema.feature_columns) {
    for (const auto& ref : *schema.feature_columns) {
      feature_cols.push_back(resolve_column(ref, table.header, width));
    }
  } else {
    for (std::size_t c = 0; c < width; ++c) {
      if (c != label_col) feature_cols.push_back(c);
    }
  }

  TabularDataset ds;
  ds.name = path.stem().string();
  for (std::size_t c : feature_cols) {
    ds.feature_names.push_back(schema.has_header ? table.header[c] : "x" + std::to_string(c));
  }
  ds.rows.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    if (cells.size() != width) {
      throw FormatError("malformed row at line " + std::to_string(line) + ": expected " +
                        std::to_string(width) + " fields, got " + std::to_string(cells.size()));
    }
    std::vector<double> values;
    values.reserve(feature_cols.size());
    for (std::size_t c : feature_cols) values.push_back(parse_number(cells[c], line, c));
    ds.rows.push_back({Vector(std::move(values)), parse_label(cells[label_col], line, label_col)});
  }
  return ds;
}

void write_csv(const TabularDataset& ds, const std::filesystem::path& path, char delimiter) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& name : ds.feature_names) out << quote_csv_field(name, delimiter) << delimiter;
  out << "label\n";
  for (const auto& row : ds.rows) {
    for (double v : row.features) out << format_number(v) << delimiter;
    out << row.label << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------- groups

GroupRule::GroupRule(std::string source, std::vector<double> cuts)
    : source_feature(std::move(source)), cut_points(std::move(cuts)) {
  for (std::size_t i = 0; i < cut_points.size(); ++i) {
    if (!std::isfinite(cut_points[i]) || (i > 0 && !(cut_points[i] > cut_points[i - 1]))) {
      throw InputError("group rule for '" + source_feature +
                       "': cut points must be finite and strictly ascending");
    }
  }
}

std::size_t GroupRule::group_of(double value) const noexcept {
  return static_cast<std::size_t>(
      std::upper_bound(cut_points.begin(), cut_points.end(), value) - cut_points.begin());
}

Vector encode_group(double value, const GroupRule& rule) {
  std::vector<double> onehot(rule.group_count(), 0.0);
  onehot[rule.group_of(value)] = 1.0;
  return Vector(std::move(onehot));
}

// ---------------------------------------------------------------- splits

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InputError("kfold_split: need at least 2 folds, got " + std::to_string(k));
  if (k > n) {
    throw InputError("kfold_split: " + std::to_string(k) + " folds requested for " +
                     std::to_string(n) + " rows");
  }
  return folds_from_parts(chunk(seeded_permutation(n, seed), k), n);
}

std::vector<Fold> stratified_kfold(std::span<const int> labels, std::size_t k,
                                   std::uint64_t seed) {
  if (k < 2) throw InputError("stratified_kfold: need at least 2 folds");
  if (k > labels.size()) throw InputError("stratified_kfold: more folds than rows");
  std::set<int> classes(labels.begin(), labels.end());
  std::vector<std::vector<std::size_t>> parts(k);
  std::uint64_t stream = 0;
  for (int cls : classes) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    const auto perm = seeded_permutation(members.size(), seed + 0x9E3779B97F4A7C15ULL * stream++);
    std::vector<std::size_t> order;
    order.reserve(members.size());
    for (std::size_t p : perm) order.push_back(members[p]);
    auto class_parts = chunk(order, k);
    for (std::size_t f = 0; f < k; ++f) {
      parts[f].insert(parts[f].end(), class_parts[f].begin(), class_parts[f].end());
    }
  }
  return folds_from_parts(std::move(parts), labels.size());
}

// ---------------------------------------------------------------- tasks

namespace {

OccTask build_task(const TabularDataset& ds, int target_class,
                   std::span<const std::size_t> train_rows, std::span<const std::size_t> test_rows,
                   const std::optional<PrivilegedSource>& priv, bool require_test) {
  const bool present = std::any_of(ds.rows.begin(), ds.rows.end(),
                                   [&](const LabeledRow& r) { return r.label == target_class; });
  if (!present) {
    throw InputError("target class " + std::to_string(target_class) + " is not present in '" +
                     ds.name + "'");
  }

  // Columns feeding the privileged features, and whether they leave X.
  std::vector<std::size_t> priv_cols;
  bool drop = false;
  const GroupAttribute* group = nullptr;
  if (priv) {
    if ((group = std::get_if<GroupAttribute>(&*priv))) {
      priv_cols.push_back(ds.feature_index(group->rule.source_feature));
      drop = !group->keep_in_x;
    } else {
      const auto& cols = std::get<PrivilegedColumns>(*priv);
      if (cols.features.empty()) throw InputError("no privileged columns given");
      for (const auto& name : cols.features) priv_cols.push_back(ds.feature_index(name));
      drop = !cols.keep_in_x;
    }
    if (drop && priv_cols.size() >= ds.dimension()) {
      throw InputError("removing the privileged columns leaves no decision features");
    }
  }
  auto is_priv = [&](std::size_t c) {
    return std::find(priv_cols.begin(), priv_cols.end(), c) != priv_cols.end();
  };

  auto decision_features = [&](const Vector& full) {
    if (!drop) return full;
    std::vector<double> v;
    v.reserve(full.size());
    for (std::size_t c = 0; c < full.size(); ++c) {
      if (!is_priv(c)) v.push_back(full[c]);
    }
    return Vector(std::move(v));
  };
  auto priv_features = [&](const Vector& full) {
    if (group) return encode_group(full[priv_cols.front()], group->rule);
    std::vector<double> v;
    for (std::size_t c : priv_cols) v.push_back(full[c]);
    return Vector(std::move(v));
  };

  OccTask task;
  task.target_class = target_class;
  for (std::size_t c = 0; c < ds.feature_names.size(); ++c) {
    if (!drop || !is_priv(c)) task.feature_names.push_back(ds.feature_names[c]);
  }
  if (priv) task.train_priv.emplace();
  for (std::size_t i : train_rows) {
    const auto& row = ds.rows.at(i);
    if (row.label != target_class) continue;
    task.train_target.push_back(decision_features(row.features));
    if (priv) task.train_priv->push_back(priv_features(row.features));
  }
  bool has_target = false;
  bool has_outlier = false;
  for (std::size_t i : test_rows) {
    const auto& row = ds.rows.at(i);
    const Label label = row.label == target_class ? Label::Target : Label::Outlier;
    (label == Label::Target ? has_target : has_outlier) = true;
    task.test_points.push_back(decision_features(row.features));
    task.test_labels.push_back(label);
  }
  if (task.train_target.empty()) {
    throw InputError((require_test ? "empty train or test partition for target class "
                                   : "no training rows of target class ") +
                     std::to_string(target_class));
  }
  if (!require_test) return task;
  if (task.test_points.empty()) {
    throw InputError("empty train or test partition for target class " +
                     std::to_string(target_class));
  }
  if (!has_target || !has_outlier) {
    throw InputError("test partition for target class " + std::to_string(target_class) +
                     " needs at least one target and one outlier row");
  }
  return task;
}

}  // namespace

OccTask make_occ_task(const TabularDataset& ds, int target_class,
                      std::span<const std::size_t> train_rows,
                      std::span<const std::size_t> test_rows,
                      const std::optional<PrivilegedSource>& priv) {
  return build_task(ds, target_class, train_rows, test_rows, priv, true);
}

OccTask make_training_task(const TabularDataset& ds, int target_class,
                           const std::optional<PrivilegedSource>& priv) {
  std::vector<std::size_t> rows(ds.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return build_task(ds, target_class, rows, {}, priv, false);
}

OccTask make_occ_task(const TabularDataset& ds, int target_class, const SplitSpec& split,
                      const std::optional<PrivilegedSource>& priv) {
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;

  if (const auto* holdout = std::get_if<HoldoutSplit>(&split)) {
    if (!(holdout->train_fraction > 0.0 && holdout->train_fraction < 1.0)) {
      throw InputError("holdout train fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
      if (ds.rows[i].label == target_class) targets.push_back(i);
      else test_rows.push_back(i);
    }
    const auto perm = seeded_permutation(targets.size(), holdout->seed);
    const auto n_train = static_cast<std::size_t>(
        std::floor(holdout->train_fraction * static_cast<double>(targets.size()) + 1e-9));
    for (std::size_t p = 0; p < perm.size(); ++p) {
      (p < n_train ? train_rows : test_rows).push_back(targets[perm[p]]);
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
  } else {
    const auto& kfold = std::get<KFoldSplit>(split);
    if (kfold.fold >= kfold.folds) throw InputError("fold index out of range");
    std::vector<int> labels;
    labels.reserve(ds.rows.size());
    for (const auto& row : ds.rows) labels.push_back(row.label);
    auto folds = stratified_kfold(labels, kfold.folds, kfold.seed);
    train_rows = std::move(folds[kfold.fold].train);
    test_rows = std::move(folds[kfold.fold].test);
  }
  return make_occ_task(ds, target_class, train_rows, test_rows, priv);
}

// ---------------------------------------------------------------- scaling

Standardizer Standardizer::fit(const PointSet& points) {
  if (points.empty()) throw InputError("Standardizer::fit: no points");
  const std::size_t dim = points.front().size();
  const double n = static_cast<double>(points.size());
  Standardizer s;
  s.means_.assign(dim, 0.0);
  s.scales_.assign(dim, 0.0);
  for (const auto& p : points) {
    if (p.size() != dim) throw InputError("Standardizer::fit: points differ in dimension");
    for (std::size_t j = 0; j < dim; ++j) s.means_[j] += p[j];
  }
  for (double& m : s.means_) m /= n;
  for (const auto& p : points) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = p[j] - s.means_[j];
      s.scales_[j] += d * d;
    }
  }
  for (double& v : s.scales_) {
    v = std::sqrt(v / n);
    if (!(v > 1e-12)) v = 1.0;
  }
  return s;
}

Standardizer Standardizer::from_parts(std::vector<double> means, std::vector<double> scales) {
  if (means.size() != scales.size()) {
    throw InputError("Standardizer: " + std::to_string(means.size()) + " means but " +
                     std::to_string(scales.size()) + " scales");
  }
  for (std::size_t j = 0; j < means.size(); ++j) {
    if (!std::isfinite(means[j]) || !(scales[j] > 0.0) || !std::isfinite(scales[j])) {
      throw InputError("Standardizer: invalid statistics for feature " + std::to_string(j));
    }
  }
  Standardizer s;
  s.means_ = std::move(means);
  s.scales_ = std::move(scales);
  return s;
}

Vector Standardizer::apply(const Vector& x) const {
  if (x.size() != means_.size()) {
    throw InputError("Standardizer::apply: expected dimension " + std::to_string(means_.size()) +
                     ", got " + std::to_string(x.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - means_[j]) / scales_[j];
  return Vector(std::move(out));
}

PointSet Standardizer::apply(const PointSet& xs) const {
  PointSet out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(apply(x));
  return out;
}

OccTask standardize(const OccTask& task) {
  const Standardizer s = Standardizer::fit(task.train_target);
  OccTask out = task;
  out.train_target = s.apply(task.train_target);
  out.test_points = s.apply(task.test_points);
  out.validation_points = s.apply(task.validation_points);
  return out;
}

}  // namespace lupi_occ
