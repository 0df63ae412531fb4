#include "lupi_occ/experiment.hpp"

#include <numeric>

#include "lupi_occ/errors.hpp"

namespace lupi_occ {

namespace {

double mean_percent(const std::vector<FoldResult>& folds, double ClassificationScores::*field) {
  if (folds.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& f : folds) sum += 100.0 * (f.test.*field);
  return sum / static_cast<double>(folds.size());
}

GridSearchOptions search_options(const ExperimentSpec& spec) {
  return {spec.priv_sigma, spec.r, spec.threads};
}

// Re-raises the current library error with context prepended, keeping its kind.
[[noreturn]] void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const TrainingError& e) {
    throw TrainingError(context + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context + e.what());
  } catch (const FormatError& e) {
    throw FormatError(context + e.what());
  } catch (const IoError& e) {
    throw IoError(context + e.what());
  } catch (const InputError& e) {
    throw InputError(context + e.what());
  } catch (const Error& e) {
    throw Error(context + e.what());
  }
}

FoldResult search_and_score(const OccTask& selection, const OccTask& final_task, Method method,
                            const ExperimentSpec& spec, std::size_t fold) {
  GridSearchOptions options = search_options(spec);
  options.keep_ranking = true;
  const GridSearchResult found = grid_search(selection, spec.grid, method, options);
  // The winner is retrained on more rows than it was selected on, which can
  // make its system singular; the next-ranked point is used in that case.
  for (std::size_t rank = 0; rank < found.ranking.size(); ++rank) {
    const ScoredPoint& candidate = found.ranking[rank];
    try {
      FoldResult out;
      out.fold = fold;
      out.params = candidate.point;
      out.validation_precision = candidate.validation_precision;
      out.skipped_singular = found.skipped_singular;
      out.selection_rank = rank;
      out.test = evaluate_params(final_task, method, candidate.point, spec.priv_sigma, spec.r);
      return out;
    } catch (const TrainingError&) {
    }
  }
  throw TrainingError("no grid point could be trained on the full training partition");
}

FoldResult run_fold(const OccTask& selection, const OccTask& final_task, Method method,
                    const ExperimentSpec& spec, std::size_t fold, const std::string& label) {
  try {
    return search_and_score(selection, final_task, method, spec, fold);
  } catch (const Error&) {
    rethrow_with_context(label + ", " + display_name(method) + ", fold " + std::to_string(fold) +
                         ": ");
  }
}

}  // namespace

double EvalReport::average_precision() const {
  return mean_percent(folds, &ClassificationScores::precision);
}
double EvalReport::average_recall() const {
  return mean_percent(folds, &ClassificationScores::recall);
}
double EvalReport::average_f1() const { return mean_percent(folds, &ClassificationScores::f1); }

ClassificationScores evaluate_params(const OccTask& task, Method method, const GridPoint& params,
                                     std::optional<double> priv_sigma, double r) {
  const KernelParams kernel = KernelParams::gaussian(params.sigma);
  std::vector<Label> predicted;
  if (method == Method::Koc) {
    predicted = predict_labels(train_koc(task.train_target, kernel, params.c, params.eta, r),
                               task.test_points);
  } else {
    if (!task.has_priv()) throw InputError("privileged features required for KOC+");
    const KernelParams priv_kernel = KernelParams::gaussian(priv_sigma.value_or(params.sigma));
    predicted = predict_labels(train_kocplus(task.train_target, *task.train_priv, kernel,
                                             priv_kernel, params.c, params.mu, params.eta, r),
                               task.test_points);
  }
  return score_predictions(predicted, task.test_labels);
}

std::vector<EvalReport> run_experiment(const TabularDataset& ds, const ExperimentSpec& spec) {
  spec.grid.validate();
  if (spec.target_classes.empty()) throw InputError("experiment: no target classes");
  if (spec.group_attributes.empty()) throw InputError("experiment: no group attributes");
  if (spec.methods.empty()) throw InputError("experiment: no methods");
  if (ds.rows.empty()) throw InputError("experiment: dataset is empty");

  std::vector<int> labels;
  for (const auto& row : ds.rows) labels.push_back(row.label);
  const std::vector<Fold> folds = stratified_kfold(labels, spec.folds, spec.seed);

  std::vector<EvalReport> reports;
  for (int target : spec.target_classes) {
    for (const auto& attr : spec.group_attributes) {
      std::vector<EvalReport> rows;
      for (Method m : spec.methods) {
        EvalReport rep;
        rep.dataset = spec.dataset + "(" + std::to_string(target) + ")";
        rep.target_class = target;
        rep.group_attribute = attr.name;
        rep.method = m;
        rep.seed = spec.seed;
        rows.push_back(std::move(rep));
      }
      const std::string label = rows.front().dataset + "/" + attr.name;
      for (std::size_t f = 0; f < folds.size(); ++f) {
        OccTask selection;
        OccTask final_task;
        try {
          const TabularDataset fold_train = ds.subset(folds[f].train);
          selection = make_occ_task(
              fold_train, target,
              HoldoutSplit{spec.selection_train_fraction, spec.seed + 1 + f}, attr);
          final_task = make_occ_task(ds, target, folds[f].train, folds[f].test, attr);
          if (spec.standardize) {
            selection = standardize(selection);
            final_task = standardize(final_task);
          }
        } catch (const Error&) {
          rethrow_with_context(label + ", fold " + std::to_string(f + 1) + ": ");
        }
        for (std::size_t m = 0; m < spec.methods.size(); ++m) {
          rows[m].folds.push_back(
              run_fold(selection, final_task, spec.methods[m], spec, f + 1, label));
        }
      }
      for (auto& r : rows) reports.push_back(std::move(r));
    }
  }
  return reports;
}

std::vector<EvalReport> run_heldout_experiment(const OccTask& task, const std::string& dataset,
                                               const std::string& group_attribute,
                                               const ExperimentSpec& spec) {
  spec.grid.validate();
  if (spec.methods.empty()) throw InputError("experiment: no methods");
  const OccTask prepared = spec.standardize ? standardize(task) : task;
  const OccTask selection = validation_view(prepared);

  std::vector<EvalReport> reports;
  for (Method m : spec.methods) {
    EvalReport rep;
    rep.dataset = dataset;
    rep.target_class = task.target_class;
    rep.group_attribute = group_attribute;
    rep.method = m;
    rep.seed = spec.seed;
    rep.folds.push_back(run_fold(selection, prepared, m, spec, 1, dataset + "/" + group_attribute));
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace lupi_occ
