#pragma once

// Cross-validated comparison of KOC and KOC+ across target classes and
// privileged group attributes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lupi_occ/data.hpp"
#include "lupi_occ/eval.hpp"

namespace lupi_occ {

struct ExperimentSpec {
  std::string dataset;  // display name, e.g. "Heart"
  std::vector<int> target_classes;
  std::vector<GroupAttribute> group_attributes;
  std::vector<Method> methods{Method::Koc, Method::KocPlus};
  HyperGrid grid = HyperGrid::defaults();
  std::size_t folds = 5;
  std::uint64_t seed = 42;
  // Share of each fold's training targets used to fit candidates during
  // selection; the rest of the fold's training rows score them.
  double selection_train_fraction = 0.8;
  bool standardize = true;
  std::optional<double> priv_sigma;
  double r = 1.0;
  std::size_t threads = 1;
};

struct FoldResult {
  std::size_t fold = 0;  // 1-based
  GridPoint params;
  double validation_precision = 0.0;
  std::size_t skipped_singular = 0;
  // Position of params in the selection ranking. Non-zero when better-ranked
  // points could not be retrained on the full fold (singular system).
  std::size_t selection_rank = 0;
  ClassificationScores test;
};

struct EvalReport {
  std::string dataset;  // e.g. "Heart(1)"
  int target_class = 0;
  std::string group_attribute;
  Method method = Method::Koc;
  std::vector<FoldResult> folds;
  std::uint64_t seed = 0;

  // Arithmetic means over folds, in percent.
  double average_precision() const;
  double average_recall() const;
  double average_f1() const;
};

// For every target class, group attribute and method: stratified k-fold over
// all rows; within each fold the grid is searched on an inner holdout of the
// fold's training rows, the winner is retrained on all of the fold's training
// targets and scored on the fold's test rows.
std::vector<EvalReport> run_experiment(const TabularDataset& ds, const ExperimentSpec& spec);

// Fixed train/validation/test task (one "fold"): the grid is searched on the
// validation partition and the winner scored on the test partition. Only the
// methods, grid, standardize, priv_sigma, r, seed and threads fields of spec
// are used.
std::vector<EvalReport> run_heldout_experiment(const OccTask& task, const std::string& dataset,
                                               const std::string& group_attribute,
                                               const ExperimentSpec& spec);

// Trains the chosen method on a task's training targets with fixed
// parameters and scores it on the test partition.
ClassificationScores evaluate_params(const OccTask& task, Method method, const GridPoint& params,
                                     std::optional<double> priv_sigma = std::nullopt,
                                     double r = 1.0);

}  // namespace lupi_occ
