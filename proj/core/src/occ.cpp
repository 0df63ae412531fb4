#include "lupi_occ/occ.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "lupi_occ/errors.hpp"

namespace lupi_occ {

namespace {

void require_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw InputError("rejection fraction eta must lie in (0, 1], got " + std::to_string(eta));
  }
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InputError(std::string(name) + " must be positive and finite, got " + std::to_string(v));
  }
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw InputError(std::string(name) + " must be finite");
}

std::string describe(double c, double sigma) {
  std::ostringstream os;
  os.precision(6);
  os << "C=" << c << ", sigma=" << sigma;
  return os.str();
}

std::string describe(double c, double mu, double sigma, double priv_sigma) {
  std::ostringstream os;
  os.precision(6);
  os << "mu=" << mu << ", C=" << c << ", sigma=" << sigma << ", priv_sigma=" << priv_sigma;
  return os.str();
}

}  // namespace

const char* to_string(Label label) noexcept {
  return label == Label::Target ? "target" : "outlier";
}

// ---------------------------------------------------------------- models

KocModel make_koc_model(PointSet train_points, KernelParams kernel, Vector weights,
                        Vector train_scores, double c, double eta, double r) {
  return KocModel(std::move(train_points), kernel, std::move(weights), std::move(train_scores), c,
                  eta, r);
}

KocModel::KocModel(PointSet train_points, KernelParams kernel, Vector weights,
                   Vector train_scores, double c, double eta, double r)
    : train_points_(std::move(train_points)),
      kernel_(kernel),
      weights_(std::move(weights)),
      train_scores_(std::move(train_scores)),
      c_(c),
      eta_(eta),
      r_(r),
      theta_(compute_threshold(distances(train_scores_, r), eta)) {}

KocModel KocModel::restore(PointSet train_points, KernelParams kernel, Vector weights, double c,
                           double eta, double r, double stored_theta) {
  require_positive(c, "C");
  require_eta(eta);
  require_finite(r, "r");
  if (train_points.empty()) throw InputError("model has no training points");
  if (weights.size() != train_points.size()) {
    throw InputError("model has " + std::to_string(weights.size()) + " weights for " +
                     std::to_string(train_points.size()) + " training points");
  }
  Vector scores = matvec(kernel_matrix(train_points, kernel), weights);
  KocModel model(std::move(train_points), kernel, std::move(weights), std::move(scores), c, eta,
                 r);
  if (model.theta() != stored_theta) {
    throw InputError("stored threshold " + std::to_string(stored_theta) +
                     " does not match the threshold implied by the weights (" +
                     std::to_string(model.theta()) + ")");
  }
  return model;
}

KocModel KocModel::with_eta(double eta) const {
  require_eta(eta);
  return KocModel(train_points_, kernel_, weights_, train_scores_, c_, eta, r_);
}

KocPlusModel::KocPlusModel(KocModel decision, PointSet priv_points, KernelParams priv_kernel,
                           double mu, Vector correction_weights)
    : decision_(std::move(decision)),
      priv_points_(std::move(priv_points)),
      priv_kernel_(priv_kernel),
      mu_(mu),
      correction_weights_(std::move(correction_weights)) {}

KocPlusModel KocPlusModel::restore(KocModel decision, PointSet priv_points,
                                   KernelParams priv_kernel, double mu,
                                   Vector correction_weights) {
  require_positive(mu, "mu");
  const std::size_t n = decision.train_points().size();
  if (priv_points.size() != n || correction_weights.size() != n) {
    throw InputError("privileged points / correction weights do not match " + std::to_string(n) +
                     " training points");
  }
  return KocPlusModel(std::move(decision), std::move(priv_points), priv_kernel, mu,
                      std::move(correction_weights));
}

// ---------------------------------------------------------------- solvers

KocSolver::KocSolver(Matrix kernel, double r)
    : kernel_(std::move(kernel)), target_(Vector::constant(kernel_.rows(), r)) {
  if (!kernel_.is_square()) throw InputError("KocSolver: kernel matrix must be square");
}

Vector KocSolver::weights(double c) const {
  require_positive(c, "C");
  const std::size_t n = kernel_.rows();
  std::vector<double> a(kernel_.entries().begin(), kernel_.entries().end());
  const double ridge = 1.0 / c;
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += ridge;
  return solve(Matrix(n, n, std::move(a)), target_);
}

KocPlusSolver::KocPlusSolver(Matrix kernel, Matrix priv_kernel, double r)
    : kernel_(std::move(kernel)),
      priv_kernel_(std::move(priv_kernel)),
      priv_times_kernel_(matmul(priv_kernel_, kernel_)),
      target_(Vector::constant(kernel_.rows(), r)),
      priv_times_target_(matvec(priv_kernel_, target_)) {
  if (!kernel_.is_square() || !priv_kernel_.is_square() || kernel_.rows() != priv_kernel_.rows()) {
    throw InputError("KocPlusSolver: kernel matrices must be square and of equal size");
  }
}

Vector KocPlusSolver::weights(double c, double mu) const {
  require_positive(c, "C");
  require_positive(mu, "mu");
  const std::size_t n = kernel_.rows();
  const auto k = kernel_.entries();
  const auto ks = priv_kernel_.entries();
  const auto ksk = priv_times_kernel_.entries();
  // A = mu K + C K* K + K*
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n * n; ++i) a[i] = mu * k[i] + c * ksk[i] + ks[i];
  // b = (mu I + C K*) r
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = mu * target_[i] + c * priv_times_target_[i];
  return solve(Matrix(n, n, std::move(a)), Vector(std::move(b)));
}

// ---------------------------------------------------------------- training

KocModel train_koc(const PointSet& x, const KernelParams& kernel, double c, double eta, double r) {
  if (x.empty()) throw InputError("train_koc: no training points");
  require_positive(c, "C");
  require_eta(eta);
  require_finite(r, "r");

  KocSolver solver(kernel_matrix(x, kernel), r);
  Vector w;
  try {
    w = solver.weights(c);
  } catch (const SingularMatrixError& e) {
    throw TrainingError(std::string("KOC system is singular (") + describe(c, kernel.width()) +
                        "): " + e.what());
  }
  Vector scores = matvec(solver.kernel(), w);
  return make_koc_model(x, kernel, std::move(w), std::move(scores), c, eta, r);
}

KocPlusModel train_kocplus(const PointSet& x, const PointSet& x_star, const KernelParams& kernel,
                           const KernelParams& priv_kernel, double c, double mu, double eta,
                           double r) {
  if (x.empty()) throw InputError("train_kocplus: no training points");
  if (x_star.size() != x.size()) {
    throw InputError("train_kocplus: " + std::to_string(x.size()) + " training points but " +
                     std::to_string(x_star.size()) + " privileged points");
  }
  require_positive(c, "C");
  require_positive(mu, "mu");
  require_eta(eta);
  require_finite(r, "r");

  KocPlusSolver solver(kernel_matrix(x, kernel), kernel_matrix(x_star, priv_kernel), r);
  Vector w;
  try {
    w = solver.weights(c, mu);
  } catch (const SingularMatrixError& e) {
    throw TrainingError(std::string("KOC+ system is singular (") +
                        describe(c, mu, kernel.width(), priv_kernel.width()) + "): " + e.what());
  }
  Vector w_star =
      recover_correction_weights(solver.priv_kernel(), solver.kernel(), w, solver.target());
  Vector scores = matvec(solver.kernel(), w);
  KocModel decision = make_koc_model(x, kernel, std::move(w), std::move(scores), c, eta, r);
  return KocPlusModel::restore(std::move(decision), x_star, priv_kernel, mu, std::move(w_star));
}

Vector recover_correction_weights(const Matrix& k_star, const Matrix& k, const Vector& w,
                                  const Vector& r) {
  const Vector slack = r - matvec(k, w);
  return min_norm_solve(k_star, slack);
}

// ---------------------------------------------------------------- decision

Vector predict_scores(const KocModel& model, const PointSet& points) {
  if (points.empty()) return {};
  const std::size_t dim = model.dimension();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) {
      throw InputError("predict: point " + std::to_string(i) + " has dimension " +
                       std::to_string(points[i].size()) + ", model expects " +
                       std::to_string(dim));
    }
  }
  return matvec(kernel_matrix(points, model.train_points(), model.kernel()), model.weights());
}

Vector predict_scores(const KocPlusModel& model, const PointSet& points) {
  return predict_scores(model.decision(), points);
}

Vector distances(const Vector& scores, double r) {
  std::vector<double> d(scores.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(scores[i] - r);
  return Vector(std::move(d));
}

double compute_threshold(const Vector& d, double eta) {
  if (d.empty()) throw InputError("compute_threshold: no distances");
  require_eta(eta);
  std::vector<double> sorted = d.to_std();
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
  const double n = static_cast<double>(sorted.size());
  // The small offset keeps products such as 0.3 * 10 from flooring to 2.
  auto index = static_cast<std::size_t>(std::floor(eta * n + 1e-9));
  index = std::clamp<std::size_t>(index, 1, sorted.size());
  return sorted[index - 1];
}

Label classify(double score, double theta, double r) {
  return std::abs(score - r) <= theta ? Label::Target : Label::Outlier;
}

std::vector<Label> classify(const Vector& scores, double theta, double r) {
  std::vector<Label> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(classify(s, theta, r));
  return out;
}

std::vector<Label> predict_labels(const KocModel& model, const PointSet& points) {
  return classify(predict_scores(model, points), model.theta(), model.r());
}

std::vector<Label> predict_labels(const KocPlusModel& model, const PointSet& points) {
  return predict_labels(model.decision(), points);
}

double stationarity_residual(const Matrix& k, const Matrix& k_star, const Vector& w, double r,
                             double c, double mu) {
  const Vector target = Vector::constant(w.size(), r);
  const Vector slack = target - matvec(k, w);
  const Vector residual = mu * slack + c * matvec(k_star, slack) - matvec(k_star, w);
  return norm_inf(residual);
}

double stationarity_residual(const KocPlusModel& model) {
  const auto& d = model.decision();
  return stationarity_residual(kernel_matrix(d.train_points(), d.kernel()),
                               kernel_matrix(model.priv_points(), model.priv_kernel()),
                               d.weights(), d.r(), d.c(), model.mu());
}

}  // namespace lupi_occ
