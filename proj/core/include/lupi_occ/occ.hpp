#pragma once

// One-class classifiers built on kernel ridge regression.
//
// KOC maps every target sample to a common value r and fits reconstruction
// weights W = (K + I/C)^-1 r. KOC+ additionally models each training slack
// as a correction function of privileged features x*, which are available
// only while training:
//
//   W = (mu K + C K* K + K*)^-1 (mu I + C K*) r
//
// Both classifiers score a point by its kernel expansion over the training
// set and accept it when |score - r| does not exceed a threshold taken from
// the sorted training deviations.

#include <vector>

#include "lupi_occ/kernels.hpp"
#include "lupi_occ/linalg.hpp"

namespace lupi_occ {

enum class Label { Target, Outlier };

const char* to_string(Label label) noexcept;

class KocModel {
 public:
  // Rebuilds a trained model from stored parts. Training scores and the
  // threshold are recomputed; a stored theta that disagrees is rejected.
  static KocModel restore(PointSet train_points, KernelParams kernel, Vector weights, double c,
                          double eta, double r, double stored_theta);

  const PointSet& train_points() const noexcept { return train_points_; }
  const KernelParams& kernel() const noexcept { return kernel_; }
  const Vector& weights() const noexcept { return weights_; }
  const Vector& train_scores() const noexcept { return train_scores_; }
  double c() const noexcept { return c_; }
  double eta() const noexcept { return eta_; }
  double r() const noexcept { return r_; }
  double theta() const noexcept { return theta_; }
  std::size_t dimension() const noexcept { return train_points_.front().size(); }

  // Same weights, threshold re-derived for another rejection fraction.
  KocModel with_eta(double eta) const;

 private:
  KocModel(PointSet train_points, KernelParams kernel, Vector weights, Vector train_scores,
           double c, double eta, double r);

  friend KocModel make_koc_model(PointSet, KernelParams, Vector, Vector, double, double, double);

  PointSet train_points_;
  KernelParams kernel_;
  Vector weights_;
  Vector train_scores_;
  double c_;
  double eta_;
  double r_;
  double theta_;
};

class KocPlusModel {
 public:
  static KocPlusModel restore(KocModel decision, PointSet priv_points, KernelParams priv_kernel,
                              double mu, Vector correction_weights);

  // The test-time decision function; privileged data plays no part in it.
  const KocModel& decision() const noexcept { return decision_; }
  const PointSet& priv_points() const noexcept { return priv_points_; }
  const KernelParams& priv_kernel() const noexcept { return priv_kernel_; }
  double mu() const noexcept { return mu_; }
  const Vector& correction_weights() const noexcept { return correction_weights_; }

  const Vector& weights() const noexcept { return decision_.weights(); }
  double theta() const noexcept { return decision_.theta(); }
  double r() const noexcept { return decision_.r(); }
  double c() const noexcept { return decision_.c(); }
  double eta() const noexcept { return decision_.eta(); }

 private:
  KocPlusModel(KocModel decision, PointSet priv_points, KernelParams priv_kernel, double mu,
               Vector correction_weights);

  KocModel decision_;
  PointSet priv_points_;
  KernelParams priv_kernel_;
  double mu_;
  Vector correction_weights_;
};

// Closed-form weight solvers over precomputed kernel matrices. Grid search
// reuses one solver across many (C, mu) values; the trainers below go
// through the same code so both paths agree bit for bit.
class KocSolver {
 public:
  KocSolver(Matrix kernel, double r);
  Vector weights(double c) const;
  const Matrix& kernel() const noexcept { return kernel_; }
  const Vector& target() const noexcept { return target_; }

 private:
  Matrix kernel_;
  Vector target_;
};

class KocPlusSolver {
 public:
  KocPlusSolver(Matrix kernel, Matrix priv_kernel, double r);
  Vector weights(double c, double mu) const;
  const Matrix& kernel() const noexcept { return kernel_; }
  const Matrix& priv_kernel() const noexcept { return priv_kernel_; }
  const Vector& target() const noexcept { return target_; }

 private:
  Matrix kernel_;
  Matrix priv_kernel_;
  Matrix priv_times_kernel_;  // K* K
  Vector target_;
  Vector priv_times_target_;  // K* r
};

KocModel train_koc(const PointSet& x, const KernelParams& kernel, double c, double eta,
                   double r = 1.0);

KocPlusModel train_kocplus(const PointSet& x, const PointSet& x_star, const KernelParams& kernel,
                           const KernelParams& priv_kernel, double c, double mu, double eta,
                           double r = 1.0);

// W* = argmin-norm ||K* W* - (r - K W)||; the correction values K* W*
// reproduce the training slacks whenever those lie in the range of K*.
Vector recover_correction_weights(const Matrix& k_star, const Matrix& k, const Vector& w,
                                  const Vector& r);

Vector predict_scores(const KocModel& model, const PointSet& points);
Vector predict_scores(const KocPlusModel& model, const PointSet& points);

Vector distances(const Vector& scores, double r);

// Sorts d in decreasing order and returns its floor(eta*N)-th entry
// (1-based, clamped to [1, N]).
double compute_threshold(const Vector& d, double eta);

// Target iff |score - r| <= theta.
Label classify(double score, double theta, double r);
std::vector<Label> classify(const Vector& scores, double theta, double r);
std::vector<Label> predict_labels(const KocModel& model, const PointSet& points);
std::vector<Label> predict_labels(const KocPlusModel& model, const PointSet& points);

// ||mu (r - K W) + C K* (r - K W) - K* W||_inf, the KOC+ stationarity
// condition evaluated at W.
double stationarity_residual(const Matrix& k, const Matrix& k_star, const Vector& w, double r,
                             double c, double mu);
double stationarity_residual(const KocPlusModel& model);

}  // namespace lupi_occ
