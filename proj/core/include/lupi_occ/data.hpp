#pragma once

// Tabular datasets, one-class task construction, privileged group
// attributes and reproducible splits.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lupi_occ/kernels.hpp"
#include "lupi_occ/occ.hpp"

namespace lupi_occ {

struct LabeledRow {
  Vector features;
  int label = 0;
};

struct TabularDataset {
  std::string name;
  std::vector<std::string> feature_names;
  std::vector<LabeledRow> rows;

  std::size_t dimension() const noexcept { return feature_names.size(); }
  std::vector<int> distinct_labels() const;
  std::size_t feature_index(std::string_view feature) const;  // throws InputError
  TabularDataset subset(std::span<const std::size_t> indices) const;
};

// A column is addressed by 0-based position or, when the file has a header,
// by name.
using ColumnRef = std::variant<std::size_t, std::string>;

struct CsvSchema {
  std::optional<std::vector<ColumnRef>> feature_columns;  // default: every non-label column
  ColumnRef label_column = std::size_t{0};
  char delimiter = ',';
  bool has_header = true;
};

TabularDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

// Writes features followed by a trailing "label" column, header included.
// Values use the shortest exact decimal form, so load_csv reads back the
// same doubles.
void write_csv(const TabularDataset& ds, const std::filesystem::path& path, char delimiter = ',');

// Discretizes one raw feature into groups: value < cut[0] is group 1,
// cut[i-1] <= value < cut[i] is group i+1, value >= cut.back() is the last.
struct GroupRule {
  std::string source_feature;
  std::vector<double> cut_points;

  GroupRule(std::string source_feature, std::vector<double> cut_points);
  std::size_t group_count() const noexcept { return cut_points.size() + 1; }
  std::size_t group_of(double value) const noexcept;  // 0-based
};

// One-hot vector of length group_count().
Vector encode_group(double value, const GroupRule& rule);

// A group rule used as privileged information, under a display name.
struct GroupAttribute {
  std::string name;
  GroupRule rule;
  bool keep_in_x = false;  // by default the source column leaves the decision features
};

// Raw feature columns used directly as privileged information.
struct PrivilegedColumns {
  std::vector<std::string> features;
  bool keep_in_x = false;
};

using PrivilegedSource = std::variant<GroupAttribute, PrivilegedColumns>;

struct OccTask {
  int target_class = 0;
  std::vector<std::string> feature_names;  // decision features, when known
  PointSet train_target;
  std::optional<PointSet> train_priv;
  PointSet test_points;
  std::vector<Label> test_labels;
  // Optional separate model-selection partition (the MNIST split ships one).
  PointSet validation_points;
  std::vector<Label> validation_labels;

  bool has_priv() const noexcept { return train_priv.has_value(); }
  bool has_validation() const noexcept { return !validation_points.empty(); }
};

struct HoldoutSplit {
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
};

struct KFoldSplit {
  std::size_t folds = 5;
  std::size_t fold = 0;
  std::uint64_t seed = 42;
};

// Holdout splits only the target rows; every outlier row goes to the test
// partition. KFold is stratified over all rows and the chosen fold is the
// test partition.
using SplitSpec = std::variant<HoldoutSplit, KFoldSplit>;

OccTask make_occ_task(const TabularDataset& ds, int target_class, const SplitSpec& split,
                      const std::optional<PrivilegedSource>& priv = std::nullopt);

// Lower-level form: explicit row partitions. Train rows of other classes are
// dropped; test rows keep every class.
OccTask make_occ_task(const TabularDataset& ds, int target_class,
                      std::span<const std::size_t> train_rows,
                      std::span<const std::size_t> test_rows,
                      const std::optional<PrivilegedSource>& priv = std::nullopt);

// Every target row of ds as training data, with no test partition.
OccTask make_training_task(const TabularDataset& ds, int target_class,
                           const std::optional<PrivilegedSource>& priv = std::nullopt);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded permutation of 0..n-1 cut into k contiguous test folds whose sizes
// differ by at most one.
std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

// kfold_split applied within each class; fold i merges every class's fold i.
std::vector<Fold> stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed);

// Deterministic Fisher-Yates permutation, identical on every platform.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

// Per-feature z-scoring fitted on one point set. Constant features are
// centred but left unscaled.
class Standardizer {
 public:
  static Standardizer fit(const PointSet& points);
  // Throws InputError unless the lists match in length and scales are
  // positive and finite.
  static Standardizer from_parts(std::vector<double> means, std::vector<double> scales);
  Vector apply(const Vector& x) const;
  PointSet apply(const PointSet& xs) const;

  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& scales() const noexcept { return scales_; }

 private:
  std::vector<double> means_;
  std::vector<double> scales_;
};

// Standardizes every point set of a task with statistics of its training
// targets. Privileged features are left alone.
OccTask standardize(const OccTask& task);

}  // namespace lupi_occ
