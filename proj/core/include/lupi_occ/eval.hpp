#pragma once

// Precision scoring and exhaustive hyperparameter search.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lupi_occ/data.hpp"
#include "lupi_occ/occ.hpp"

namespace lupi_occ {

enum class Method { Koc, KocPlus };

const char* display_name(Method m) noexcept;  // "KOC" / "KOC+"
const char* cli_name(Method m) noexcept;      // "koc" / "kocplus"
Method parse_method(const std::string& text);

// Target is the positive class. Precision is 0 when nothing is predicted
// Target; recall and F1 follow the same zero-denominator convention.
struct ClassificationScores {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

ClassificationScores score_predictions(std::span<const Label> predictions,
                                       std::span<const Label> truth);
double precision_score(std::span<const Label> predictions, std::span<const Label> truth);

// count values whose base-10 exponents are evenly spaced from lo to hi.
std::vector<double> log_spaced(double lo_exponent, double hi_exponent, std::size_t count);
std::vector<double> linear_spaced(double lo, double hi, std::size_t count);

struct HyperGrid {
  std::vector<double> sigmas;
  std::vector<double> etas;
  std::vector<double> cs;
  std::vector<double> mus;

  // 20 widths 10^-10 .. 10^20 (log spaced), 10 rejection fractions
  // 0.05 .. 0.7, and the width grid reused for C and mu.
  static HyperGrid defaults();
  void validate() const;
  std::size_t size(bool with_mu) const noexcept;
};

struct GridPoint {
  double sigma = 0.0;
  double c = 0.0;
  double mu = 0.0;  // unused (0) for KOC
  double eta = 0.0;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct GridSearchOptions {
  std::optional<double> priv_sigma;  // default: share the decision-kernel width
  double r = 1.0;
  std::size_t threads = 1;
  bool keep_ranking = false;  // fill GridSearchResult::ranking
};

struct ScoredPoint {
  GridPoint point;
  double validation_precision = 0.0;
};

struct GridSearchResult {
  GridPoint best;
  double validation_precision = 0.0;
  std::size_t evaluated = 0;         // (sigma, C, mu) triples trained
  std::size_t skipped_singular = 0;  // triples whose system was singular
  // Every evaluated point, best first, ties in grid order. Only filled when
  // keep_ranking is set.
  std::vector<ScoredPoint> ranking;
};

// Trains on the task's training targets and scores every grid point on the
// task's test partition, returning the most precise point. Ties go to the
// smallest sigma, then C, then mu, then eta. Singular configurations are
// skipped; if all are singular a TrainingError is raised.
GridSearchResult grid_search(const OccTask& selection_task, const HyperGrid& grid, Method method,
                             const GridSearchOptions& options = {});

// The task with its validation partition promoted to the test partition, for
// use with grid_search.
OccTask validation_view(const OccTask& task);

}  // namespace lupi_occ
