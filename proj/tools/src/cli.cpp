#include "lupi_occ_cli/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lupi_occ/csv.hpp"
#include "lupi_occ/data.hpp"
#include "lupi_occ/datasets.hpp"
#include "lupi_occ/errors.hpp"
#include "lupi_occ/eval.hpp"
#include "lupi_occ/experiment.hpp"
#include "lupi_occ/io.hpp"
#include "lupi_occ/model_io.hpp"
#include "lupi_occ/report.hpp"

namespace lupi_occ::cli {

namespace {

namespace fs = std::filesystem;

// Bad flag values detected after parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

const std::vector<std::string> kDatasets{"heart", "abalone", "mnist"};

std::string normalize_name(std::string s) {
  for (char& ch : s) {
    ch = ch == '_' ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  return s;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      out.push_back(parse_number(cell, 1, out.size()));
    } catch (const FormatError&) {
      throw UsageError(std::string(flag) + ": '" + cell + "' is not a number");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

struct DataOptions {
  std::string dataset = "csv";
  std::string data;
  std::string data_dir;
  std::string label_column = "label";
  std::string group_attr;
  std::vector<std::string> priv_columns;
  bool keep_priv_in_x = false;
};

void add_data_options(CLI::App* app, DataOptions& o, bool allow_csv) {
  app->add_option("--dataset", o.dataset,
                  allow_csv ? "heart, abalone or csv (generic CSV given by --data)"
                            : "heart, abalone or mnist");
  app->add_option("--data", o.data, "Dataset file (CSV with a header for --dataset csv)");
  app->add_option("--data-dir", o.data_dir,
                  "Directory holding the benchmark files (default: $LUPI_OCC_DATA_DIR or ./data)");
  app->add_option("--label-column", o.label_column, "Label column name for CSV input");
  app->add_option("--group-attr", o.group_attr, "Privileged group attribute, e.g. Age");
  app->add_option("--priv-columns", o.priv_columns, "CSV columns used as privileged features")
      ->delimiter(',');
  app->add_flag("--keep-priv-in-x", o.keep_priv_in_x,
                "Keep privileged columns among the decision features");
}

fs::path data_root(const DataOptions& o) {
  if (!o.data_dir.empty()) return o.data_dir;
  if (const char* env = std::getenv("LUPI_OCC_DATA_DIR"); env && *env) return env;
  return "data";
}

fs::path require_file(const fs::path& path) {
  if (!fs::exists(path)) {
    throw IoError("dataset file not found: expected '" + path.string() +
                  "' (use --data, --data-dir or LUPI_OCC_DATA_DIR)");
  }
  return path;
}

fs::path dataset_file(const DataOptions& o, const char* default_name) {
  return require_file(o.data.empty() ? data_root(o) / default_name : fs::path(o.data));
}

TabularDataset load_dataset(const DataOptions& o) {
  if (o.dataset == "heart") return load_heart(dataset_file(o, "heart.dat"));
  if (o.dataset == "abalone") return load_abalone(dataset_file(o, "abalone.data"));
  if (o.dataset == "csv") {
    if (o.data.empty()) throw UsageError("--data is required for --dataset csv");
    CsvSchema schema;
    schema.label_column = o.label_column;
    return load_csv(require_file(o.data), schema);
  }
  throw UsageError("unknown dataset '" + o.dataset + "' (valid: heart, abalone, csv)");
}

std::vector<GroupAttribute> attributes_for(const std::string& dataset) {
  if (dataset == "heart") return heart_group_attributes();
  if (dataset == "abalone") return abalone_group_attributes();
  return {};
}

GroupAttribute find_attribute(const std::string& dataset, const std::string& name) {
  const auto attrs = attributes_for(dataset);
  std::vector<std::string> names;
  for (const auto& a : attrs) {
    if (normalize_name(a.name) == normalize_name(name)) return a;
    names.push_back(a.name);
  }
  if (names.empty()) {
    throw UsageError("--group-attr is only available for heart and abalone; use --priv-columns");
  }
  throw UsageError("unknown group attribute '" + name + "' for " + dataset + " (valid: " +
                   join(names, ", ") + ")");
}

std::optional<PrivilegedSource> privileged_source(const DataOptions& o) {
  if (!o.group_attr.empty() && !o.priv_columns.empty()) {
    throw UsageError("--group-attr and --priv-columns are mutually exclusive");
  }
  if (!o.group_attr.empty()) {
    GroupAttribute attr = find_attribute(o.dataset, o.group_attr);
    attr.keep_in_x = o.keep_priv_in_x;
    return attr;
  }
  if (!o.priv_columns.empty()) return PrivilegedColumns{o.priv_columns, o.keep_priv_in_x};
  return std::nullopt;
}

void require_priv(Method method, const std::optional<PrivilegedSource>& priv) {
  if (method == Method::KocPlus && !priv) {
    throw InputError("privileged features required for KOC+ (use --group-attr or --priv-columns)");
  }
}

struct GridOptions {
  std::string sigma;
  std::string c;
  std::string mu;
  std::string eta;
};

void add_grid_options(CLI::App* app, GridOptions& g) {
  app->add_option("--grid-sigma", g.sigma, "Comma-separated kernel widths");
  app->add_option("--grid-c", g.c, "Comma-separated C values");
  app->add_option("--grid-mu", g.mu, "Comma-separated mu values");
  app->add_option("--grid-eta", g.eta, "Comma-separated rejection fractions");
}

HyperGrid build_grid(const GridOptions& g) {
  HyperGrid grid = HyperGrid::defaults();
  if (!g.sigma.empty()) grid.sigmas = parse_list(g.sigma, "--grid-sigma");
  if (!g.c.empty()) grid.cs = parse_list(g.c, "--grid-c");
  if (!g.mu.empty()) grid.mus = parse_list(g.mu, "--grid-mu");
  if (!g.eta.empty()) grid.etas = parse_list(g.eta, "--grid-eta");
  try {
    grid.validate();
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  return grid;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  DataOptions data;
  int target_class = 0;
  std::string method = "koc";
  double sigma = 0.0;
  double c = 0.0;
  std::optional<double> mu;
  double eta = 0.0;
  std::optional<double> priv_sigma;
  bool standardize = false;
  std::uint64_t seed = 42;
  std::string out;
};

int cmd_train(const TrainOptions& o, std::ostream& out) {
  const Method method = parse_method(o.method);
  if (method == Method::KocPlus && !o.mu) throw UsageError("--mu is required for kocplus");
  const TabularDataset ds = load_dataset(o.data);
  const auto priv = privileged_source(o.data);
  require_priv(method, priv);

  OccTask task = make_training_task(ds, o.target_class, priv);
  std::optional<Standardizer> scaler;
  if (o.standardize) {
    scaler = Standardizer::fit(task.train_target);
    task.train_target = scaler->apply(task.train_target);
  }

  const KernelParams kernel = KernelParams::gaussian(o.sigma);
  AnyModel model = [&]() -> AnyModel {
    if (method == Method::Koc) return train_koc(task.train_target, kernel, o.c, o.eta);
    const KernelParams priv_kernel = KernelParams::gaussian(o.priv_sigma.value_or(o.sigma));
    return train_kocplus(task.train_target, *task.train_priv, kernel, priv_kernel, o.c, *o.mu,
                         o.eta);
  }();
  const ModelFile file{std::move(model), o.seed, o.target_class, task.feature_names, scaler};
  save_model(file, o.out);

  const KocModel& m = decision_model(file.model);
  out << "method: " << cli_name(method) << "\n"
      << "training rows: " << m.train_points().size() << "\n"
      << "features: " << m.dimension() << "\n"
      << "theta: " << format_number(m.theta()) << "\n"
      << "model: " << o.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- predict

struct PredictOptions {
  std::string model;
  std::string data;
  std::string label_column = "label";
};

int cmd_predict(const PredictOptions& o, std::ostream& out) {
  const ModelFile file = load_model(o.model);
  const KocModel& m = decision_model(file.model);
  const std::string text = read_text_file(o.data);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return kExitOk;
  const CsvTable table = parse_csv(text, ',', true);
  if (table.rows.empty()) return kExitOk;

  std::vector<std::size_t> columns;
  if (!file.feature_names.empty()) {
    for (const auto& name : file.feature_names) {
      const auto it = std::find(table.header.begin(), table.header.end(), name);
      if (it == table.header.end()) {
        throw FormatError("input lacks feature column '" + name + "' required by the model");
      }
      columns.push_back(static_cast<std::size_t>(it - table.header.begin()));
    }
  } else {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (table.header[c] != o.label_column) columns.push_back(c);
    }
  }
  if (columns.size() != m.dimension()) {
    throw FormatError("dimension mismatch: model expects " + std::to_string(m.dimension()) +
                      " features, input has " + std::to_string(columns.size()));
  }

  PointSet points;
  points.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.size() != table.header.size()) {
      throw FormatError("line " + std::to_string(table.line_numbers[i]) + ": expected " +
                        std::to_string(table.header.size()) + " fields, found " +
                        std::to_string(row.size()));
    }
    std::vector<double> v;
    v.reserve(columns.size());
    for (std::size_t c : columns) v.push_back(parse_number(row[c], table.line_numbers[i], c));
    points.emplace_back(std::move(v));
  }

  const Vector scores = predict_scores(file, points);
  out << "row,score,distance,label\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out << i << ',' << format_number(scores[i]) << ',' << format_number(std::abs(scores[i] - m.r()))
        << ',' << to_string(classify(scores[i], m.theta(), m.r())) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- grid-search

struct GridSearchOptionsCli {
  DataOptions data;
  GridOptions grid;
  int target_class = 0;
  std::string method = "koc";
  double train_fraction = 0.8;
  std::optional<double> priv_sigma;
  bool no_standardize = false;
  std::uint64_t seed = 42;
  std::size_t threads = 1;
  std::string out;
};

int cmd_grid_search(const GridSearchOptionsCli& o, std::ostream& out) {
  const Method method = parse_method(o.method);
  const HyperGrid grid = build_grid(o.grid);
  const TabularDataset ds = load_dataset(o.data);
  const auto priv = privileged_source(o.data);
  require_priv(method, priv);

  OccTask task = make_occ_task(ds, o.target_class, HoldoutSplit{o.train_fraction, o.seed}, priv);
  if (!o.no_standardize) task = standardize(task);
  const GridSearchResult r = grid_search(task, grid, method, {o.priv_sigma, 1.0, o.threads});

  const nlohmann::json doc = {{"method", cli_name(method)},
                              {"target_class", o.target_class},
                              {"seed", o.seed},
                              {"sigma", r.best.sigma},
                              {"c", r.best.c},
                              {"mu", r.best.mu},
                              {"eta", r.best.eta},
                              {"validation_precision", r.validation_precision},
                              {"evaluated", r.evaluated},
                              {"skipped_singular", r.skipped_singular}};
  const std::string text = doc.dump(2) + "\n";
  if (!o.out.empty()) write_text_file_atomic(o.out, text);
  out << text;
  return kExitOk;
}

// ---------------------------------------------------------------- reproduce

struct ReproduceOptions {
  DataOptions data;
  GridOptions grid;
  std::optional<int> target_class;
  std::vector<std::string> methods;
  std::size_t folds = 5;
  std::optional<double> priv_sigma;
  bool no_standardize = false;
  std::uint64_t seed = 42;
  std::size_t threads = 1;
  std::string out = ".";
};

std::vector<Method> methods_from(const std::vector<std::string>& names) {
  if (names.empty()) return {Method::Koc, Method::KocPlus};
  std::vector<Method> out;
  for (const auto& n : names) {
    try {
      out.push_back(parse_method(n));
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

int cmd_reproduce(const ReproduceOptions& o, std::ostream& out) {
  if (std::find(kDatasets.begin(), kDatasets.end(), o.data.dataset) == kDatasets.end()) {
    throw UsageError("unknown dataset '" + o.data.dataset + "' (valid: " + join(kDatasets, ", ") +
                     ")");
  }
  ExperimentSpec spec;
  spec.grid = build_grid(o.grid);
  spec.methods = methods_from(o.methods);
  spec.folds = o.folds;
  spec.seed = o.seed;
  spec.standardize = !o.no_standardize;
  spec.priv_sigma = o.priv_sigma;
  spec.threads = o.threads;

  ReportSet set;
  set.dataset = o.data.dataset;
  set.seed = o.seed;
  set.folds = o.folds;

  if (o.data.dataset == "mnist") {
    const fs::path root = data_root(o.data);
    const int target = o.target_class.value_or(1);
    const fs::path features = require_file(root / "mnist_features.csv");
    const fs::path priv = require_file(root / "mnist_priv.csv");
    const fs::path split = require_file(root / "mnist_split.txt");
    const OccTask task = load_mnist_task(features, priv, split, target);
    set.folds = 1;
    set.reports = run_heldout_experiment(task, "MNIST(" + std::to_string(target) + ")",
                                         "Poetic description", spec);
  } else {
    const TabularDataset ds = load_dataset(o.data);
    spec.dataset = o.data.dataset == "heart" ? "Heart" : "Abalone";
    spec.target_classes = o.target_class ? std::vector<int>{*o.target_class}
                                         : ds.distinct_labels();
    if (o.data.group_attr.empty()) {
      spec.group_attributes = attributes_for(o.data.dataset);
    } else {
      spec.group_attributes = {find_attribute(o.data.dataset, o.data.group_attr)};
    }
    for (auto& a : spec.group_attributes) a.keep_in_x = o.data.keep_priv_in_x;
    set.reports = run_experiment(ds, spec);
  }

  fs::create_directories(o.out);
  const fs::path stem = fs::path(o.out) / (o.data.dataset + "_seed" + std::to_string(o.seed));
  write_report(set, stem);
  out << render_summary_table(set) << "\n"
      << "report: " << stem.string() << ".json\n"
      << "tables: " << stem.string() << ".txt\n";
  return kExitOk;
}

// ---------------------------------------------------------------- errors

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

int report_error(std::ostream& err, const char* code, int exit_code, const std::string& message) {
  err << "error: code=" << code << " exit=" << exit_code << " message=" << one_line(message)
      << "\n";
  return exit_code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"One-class classification with privileged information (KOC, KOC+)", "lupi_occ"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LUPI_OCC_VERSION);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train a model and save it to a file");
  add_data_options(train_cmd, train.data, true);
  train_cmd->add_option("--target-class", train.target_class, "Class treated as Target")
      ->required();
  train_cmd->add_option("--method", train.method, "koc or kocplus")
      ->check(CLI::IsMember({"koc", "kocplus"}));
  train_cmd->add_option("--sigma", train.sigma, "Gaussian kernel width")->required();
  train_cmd->add_option("--c", train.c, "Regularization constant C")->required();
  train_cmd->add_option("--mu", train.mu, "Correction-space regularization (kocplus)");
  train_cmd->add_option("--eta", train.eta, "Training rejection fraction in (0, 1]")->required();
  train_cmd->add_option("--priv-sigma", train.priv_sigma,
                        "Privileged kernel width (default: --sigma)");
  train_cmd->add_flag("--standardize", train.standardize,
                      "Z-score features with training-target statistics");
  train_cmd->add_option("--seed", train.seed, "Seed recorded in the model file");
  train_cmd->add_option("--out", train.out, "Model file to write")->required();

  PredictOptions predict;
  auto* predict_cmd = app.add_subcommand("predict", "Score a CSV file with a saved model");
  predict_cmd->add_option("--model", predict.model, "Model file")->required();
  predict_cmd->add_option("--data", predict.data, "CSV file with a header row")->required();
  predict_cmd->add_option("--label-column", predict.label_column,
                          "Column ignored when the model has no feature names");

  GridSearchOptionsCli gs;
  auto* gs_cmd = app.add_subcommand("grid-search", "Select hyperparameters on a holdout split");
  add_data_options(gs_cmd, gs.data, true);
  add_grid_options(gs_cmd, gs.grid);
  gs_cmd->add_option("--target-class", gs.target_class, "Class treated as Target")->required();
  gs_cmd->add_option("--method", gs.method, "koc or kocplus")
      ->check(CLI::IsMember({"koc", "kocplus"}));
  gs_cmd->add_option("--train-fraction", gs.train_fraction,
                     "Share of target rows used for fitting");
  gs_cmd->add_option("--priv-sigma", gs.priv_sigma, "Privileged kernel width (default: sigma)");
  gs_cmd->add_flag("--no-standardize", gs.no_standardize, "Use raw feature values");
  gs_cmd->add_option("--seed", gs.seed, "Split seed");
  gs_cmd->add_option("--threads", gs.threads, "Worker threads")->check(CLI::PositiveNumber);
  gs_cmd->add_option("--out", gs.out, "Also write the JSON result to this file");

  ReproduceOptions rep;
  auto* rep_cmd = app.add_subcommand("reproduce", "Run a benchmark experiment and write reports");
  add_data_options(rep_cmd, rep.data, false);
  add_grid_options(rep_cmd, rep.grid);
  rep_cmd->add_option("--target-class", rep.target_class, "Restrict to one target class");
  rep_cmd->add_option("--method", rep.methods, "koc and/or kocplus (default: both)")
      ->delimiter(',');
  rep_cmd->add_option("--folds", rep.folds, "Cross-validation folds")
      ->check(CLI::Range(2, 1000));
  rep_cmd->add_option("--priv-sigma", rep.priv_sigma, "Privileged kernel width (default: sigma)");
  rep_cmd->add_flag("--no-standardize", rep.no_standardize, "Use raw feature values");
  rep_cmd->add_option("--seed", rep.seed, "Split seed");
  rep_cmd->add_option("--threads", rep.threads, "Worker threads")->check(CLI::PositiveNumber);
  rep_cmd->add_option("--out", rep.out, "Output directory for reports");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << LUPI_OCC_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report_error(err, "usage", kExitUsage, e.what());
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train, out);
    if (predict_cmd->parsed()) return cmd_predict(predict, out);
    if (gs_cmd->parsed()) return cmd_grid_search(gs, out);
    return cmd_reproduce(rep, out);
  } catch (const UsageError& e) {
    return report_error(err, "usage", kExitUsage, e.what());
  } catch (const InputError& e) {
    return report_error(err, "input", kExitUsage, e.what());
  } catch (const FormatError& e) {
    return report_error(err, "format", kExitFormat, e.what());
  } catch (const IoError& e) {
    return report_error(err, "io", kExitFormat, e.what());
  } catch (const NumericalError& e) {
    return report_error(err, "numerical", kExitNumerical, e.what());
  } catch (const Error& e) {
    return report_error(err, "error", kExitNumerical, e.what());
  } catch (const fs::filesystem_error& e) {
    return report_error(err, "io", kExitFormat, e.what());
  }
}

}  // namespace lupi_occ::cli
