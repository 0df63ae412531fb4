#include "lupi_occ/eval.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "lupi_occ/errors.hpp"

namespace lupi_occ {

namespace {

struct SigmaOutcome {
  bool found = false;
  GridPoint best;
  double precision = -1.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::vector<ScoredPoint> scored;
};

std::vector<double> sorted_copy(const std::vector<double>& v) {
  std::vector<double> s = v;
  std::sort(s.begin(), s.end());
  return s;
}

void check_list(const std::vector<double>& values, const char* name, bool unit_interval) {
  if (values.empty()) throw InputError(std::string("hyperparameter grid: '") + name + "' is empty");
  for (double v : values) {
    const bool ok = unit_interval ? (v > 0.0 && v <= 1.0) : (v > 0.0 && std::isfinite(v));
    if (!ok) {
      throw InputError(std::string("hyperparameter grid: '") + name + "' has invalid value " +
                       std::to_string(v));
    }
  }
}

SigmaOutcome search_sigma(const OccTask& task, double sigma, const std::vector<double>& cs,
                          const std::vector<double>& mus, const std::vector<double>& etas,
                          Method method, const GridSearchOptions& options) {
  SigmaOutcome out;
  const KernelParams kernel = KernelParams::gaussian(sigma);
  Matrix k = kernel_matrix(task.train_target, kernel);
  const Matrix k_eval = kernel_matrix(task.test_points, task.train_target, kernel);

  auto consider = [&](const Vector& w, double c, double mu) {
    ++out.evaluated;
    const Vector train_d = distances(matvec(k, w), options.r);
    const Vector eval_scores = matvec(k_eval, w);
    for (double eta : etas) {
      const double theta = compute_threshold(train_d, eta);
      const double p = precision_score(classify(eval_scores, theta, options.r), task.test_labels);
      if (options.keep_ranking) out.scored.push_back({{sigma, c, mu, eta}, p});
      if (p > out.precision) {
        out.found = true;
        out.precision = p;
        out.best = {sigma, c, mu, eta};
      }
    }
  };

  if (method == Method::Koc) {
    const KocSolver solver(k, options.r);
    for (double c : cs) {
      try {
        consider(solver.weights(c), c, 0.0);
      } catch (const SingularMatrixError&) {
        ++out.skipped;
      }
    }
  } else {
    const KernelParams priv_kernel = KernelParams::gaussian(options.priv_sigma.value_or(sigma));
    const KocPlusSolver solver(k, kernel_matrix(*task.train_priv, priv_kernel), options.r);
    for (double c : cs) {
      for (double mu : mus) {
        try {
          consider(solver.weights(c, mu), c, mu);
        } catch (const SingularMatrixError&) {
          ++out.skipped;
        }
      }
    }
  }
  return out;
}

}  // namespace

const char* display_name(Method m) noexcept { return m == Method::Koc ? "KOC" : "KOC+"; }
const char* cli_name(Method m) noexcept { return m == Method::Koc ? "koc" : "kocplus"; }

Method parse_method(const std::string& text) {
  if (text == "koc" || text == "KOC") return Method::Koc;
  if (text == "kocplus" || text == "KOC+" || text == "koc+") return Method::KocPlus;
  throw InputError("unknown method '" + text + "' (expected koc or kocplus)");
}

ClassificationScores score_predictions(std::span<const Label> predictions,
                                       std::span<const Label> truth) {
  if (predictions.size() != truth.size()) {
    throw InputError("score_predictions: " + std::to_string(predictions.size()) +
                     " predictions for " + std::to_string(truth.size()) + " labels");
  }
  if (predictions.empty()) throw InputError("score_predictions: no predictions");
  ClassificationScores s;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool predicted = predictions[i] == Label::Target;
    const bool actual = truth[i] == Label::Target;
    if (predicted && actual) ++s.true_positives;
    else if (predicted) ++s.false_positives;
    else if (actual) ++s.false_negatives;
  }
  const auto tp = static_cast<double>(s.true_positives);
  const auto fp = static_cast<double>(s.false_positives);
  const auto fn = static_cast<double>(s.false_negatives);
  s.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

double precision_score(std::span<const Label> predictions, std::span<const Label> truth) {
  return score_predictions(predictions, truth).precision;
}

std::vector<double> log_spaced(double lo_exponent, double hi_exponent, std::size_t count) {
  std::vector<double> out;
  for (double e : linear_spaced(lo_exponent, hi_exponent, count)) out.push_back(std::pow(10.0, e));
  return out;
}

std::vector<double> linear_spaced(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) out[k] = lo + step * static_cast<double>(k);
  out.back() = hi;
  return out;
}

HyperGrid HyperGrid::defaults() {
  HyperGrid g;
  g.sigmas = log_spaced(-10.0, 20.0, 20);
  g.etas = linear_spaced(0.05, 0.7, 10);
  g.cs = g.sigmas;
  g.mus = g.sigmas;
  return g;
}

void HyperGrid::validate() const {
  check_list(sigmas, "sigma", false);
  check_list(etas, "eta", true);
  check_list(cs, "C", false);
  check_list(mus, "mu", false);
}

std::size_t HyperGrid::size(bool with_mu) const noexcept {
  return sigmas.size() * cs.size() * etas.size() * (with_mu ? mus.size() : 1);
}

OccTask validation_view(const OccTask& task) {
  if (!task.has_validation()) throw InputError("task has no validation partition");
  OccTask out = task;
  out.test_points = task.validation_points;
  out.test_labels = task.validation_labels;
  out.validation_points.clear();
  out.validation_labels.clear();
  return out;
}

GridSearchResult grid_search(const OccTask& selection_task, const HyperGrid& grid, Method method,
                             const GridSearchOptions& options) {
  grid.validate();
  if (method == Method::KocPlus && !selection_task.has_priv()) {
    throw InputError("privileged features required for KOC+");
  }
  if (selection_task.train_target.empty() || selection_task.test_points.empty()) {
    throw InputError("grid_search: selection task needs training and evaluation points");
  }

  const auto sigmas = sorted_copy(grid.sigmas);
  const auto cs = sorted_copy(grid.cs);
  const auto mus = sorted_copy(grid.mus);
  const auto etas = sorted_copy(grid.etas);

  std::vector<SigmaOutcome> outcomes(sigmas.size());
  const std::size_t threads = std::max<std::size_t>(1, options.threads);
  if (threads == 1) {
    for (std::size_t s = 0; s < sigmas.size(); ++s) {
      outcomes[s] = search_sigma(selection_task, sigmas[s], cs, mus, etas, method, options);
    }
  } else {
    // Work is split by sigma; the reduction below runs in sigma order, so the
    // result is independent of scheduling.
    for (std::size_t start = 0; start < sigmas.size(); start += threads) {
      std::vector<std::future<SigmaOutcome>> batch;
      for (std::size_t s = start; s < std::min(sigmas.size(), start + threads); ++s) {
        batch.push_back(std::async(std::launch::async, search_sigma, std::cref(selection_task),
                                   sigmas[s], std::cref(cs), std::cref(mus), std::cref(etas),
                                   method, std::cref(options)));
      }
      for (std::size_t b = 0; b < batch.size(); ++b) outcomes[start + b] = batch[b].get();
    }
  }

  GridSearchResult result;
  bool found = false;
  for (const auto& o : outcomes) {
    result.evaluated += o.evaluated;
    result.skipped_singular += o.skipped;
    if (o.found && (!found || o.precision > result.validation_precision)) {
      found = true;
      result.best = o.best;
      result.validation_precision = o.precision;
    }
  }
  if (options.keep_ranking) {
    for (auto& o : outcomes) {
      result.ranking.insert(result.ranking.end(), o.scored.begin(), o.scored.end());
    }
    std::stable_sort(result.ranking.begin(), result.ranking.end(),
                     [](const ScoredPoint& a, const ScoredPoint& b) {
                       return a.validation_precision > b.validation_precision;
                     });
  }
  if (!found) {
    throw TrainingError("grid search: every configuration produced a singular system");
  }
  return result;
}

}  // namespace lupi_occ
