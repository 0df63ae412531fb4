#include "lupi_occ/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "lupi_occ/errors.hpp"

namespace lupi_occ {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> view(const Matrix& m) {
  return {m.entries().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

Eigen::Map<const Eigen::VectorXd> view(const Vector& v) {
  return {v.values().data(), static_cast<Eigen::Index>(v.size())};
}

Vector to_vector(const Eigen::VectorXd& v) {
  return Vector(std::vector<double>(v.data(), v.data() + v.size()));
}

Matrix to_matrix(const RowMajor& m) {
  return Matrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
                std::vector<double>(m.data(), m.data() + m.size()));
}

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InputError(std::string(what) + ": non-finite entry at index " + std::to_string(i));
    }
  }
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InputError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

void require_same_size(const Vector& a, const Vector& b, const char* op) {
  if (a.size() != b.size()) {
    throw InputError(std::string(op) + ": length mismatch " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
}

}  // namespace

Vector::Vector(std::vector<double> values) : values_(std::move(values)) {
  require_finite(values_, "Vector");
}

Vector::Vector(std::initializer_list<double> values) : Vector(std::vector<double>(values)) {}

Vector Vector::constant(std::size_t n, double value) {
  return Vector(std::vector<double>(n, value));
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw InputError("Matrix: " + std::to_string(entries_.size()) + " entries for a " +
                     std::to_string(rows_) + "x" + std::to_string(cols_) + " matrix");
  }
  require_finite(entries_, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InputError("Matrix: ragged initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  require_finite(entries_, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
  return Matrix(n, n, std::move(e));
}

Matrix Matrix::zeros(std::size_t rows, std::size_t cols) {
  return Matrix(rows, cols, std::vector<double>(rows * cols, 0.0));
}

Matrix Matrix::from_rows(std::span<const Vector> rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  std::vector<double> e;
  e.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw InputError("Matrix::from_rows: rows differ in length");
    e.insert(e.end(), r.begin(), r.end());
  }
  return Matrix(rows.size(), cols, std::move(e));
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw InputError("matmul: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()) + ")");
  }
  RowMajor product = view(a) * view(b);
  return to_matrix(product);
}

Matrix transpose(const Matrix& a) {
  RowMajor t = view(a).transpose();
  return to_matrix(t);
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) {
    throw InputError("matvec: matrix has " + std::to_string(a.cols()) + " columns, vector has " +
                     std::to_string(x.size()) + " entries");
  }
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * x[j];
    out[i] = acc;
  }
  return Vector(std::move(out));
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "operator+");
  std::vector<double> e(a.entries().begin(), a.entries().end());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += b.entries()[i];
  return Matrix(a.rows(), a.cols(), std::move(e));
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "operator-");
  std::vector<double> e(a.entries().begin(), a.entries().end());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= b.entries()[i];
  return Matrix(a.rows(), a.cols(), std::move(e));
}

Matrix operator*(double s, const Matrix& a) {
  std::vector<double> e(a.entries().begin(), a.entries().end());
  for (double& v : e) v *= s;
  return Matrix(a.rows(), a.cols(), std::move(e));
}

Vector operator+(const Vector& a, const Vector& b) {
  require_same_size(a, b, "operator+");
  std::vector<double> e = a.to_std();
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += b[i];
  return Vector(std::move(e));
}

Vector operator-(const Vector& a, const Vector& b) {
  require_same_size(a, b, "operator-");
  std::vector<double> e = a.to_std();
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= b[i];
  return Vector(std::move(e));
}

Vector operator*(double s, const Vector& a) {
  std::vector<double> e = a.to_std();
  for (double& v : e) v *= s;
  return Vector(std::move(e));
}

double dot(const Vector& a, const Vector& b) {
  require_same_size(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm_inf(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm2(const Vector& v) { return view(v).norm(); }

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double x : a.entries()) m = std::max(m, std::abs(x));
  return m;
}

Vector solve(const Matrix& a, const Vector& b) {
  if (!a.is_square()) {
    throw InputError("solve: matrix is " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + ", expected square");
  }
  if (a.rows() != b.size()) {
    throw InputError("solve: matrix has " + std::to_string(a.rows()) + " rows, rhs has " +
                     std::to_string(b.size()) + " entries");
  }
  if (a.rows() == 0) return {};

  const double scale = max_abs(a);
  if (scale == 0.0) throw SingularMatrixError(0, 0.0);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd(view(a)));
  const auto& packed = lu.matrixLU();
  for (Eigen::Index k = 0; k < packed.rows(); ++k) {
    const double pivot = std::abs(packed(k, k));
    if (!(pivot >= kSingularPivotRatio * scale)) {
      throw SingularMatrixError(static_cast<std::size_t>(k), pivot);
    }
  }
  Eigen::VectorXd x = lu.solve(Eigen::VectorXd(view(b)));
  if (!x.allFinite()) throw SingularMatrixError(0, 0.0);
  return to_vector(x);
}

Vector min_norm_solve(const Matrix& a, const Vector& b, double tol) {
  if (a.rows() != b.size()) {
    throw InputError("min_norm_solve: matrix has " + std::to_string(a.rows()) +
                     " rows, rhs has " + std::to_string(b.size()) + " entries");
  }
  if (!(tol >= 0.0) || !std::isfinite(tol)) throw InputError("min_norm_solve: invalid tolerance");
  if (max_abs(a) == 0.0) return Vector::zeros(a.cols());

  Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(view(a)),
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = tol * sv(0);
  // Pseudo-inverse applied explicitly so the cutoff rule is exactly ours.
  Eigen::VectorXd coeffs = svd.matrixU().transpose() * view(b);
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    coeffs(i) = sv(i) > cutoff ? coeffs(i) / sv(i) : 0.0;
  }
  Eigen::VectorXd x = svd.matrixV() * coeffs;
  return to_vector(x);
}

Vector symmetric_eigenvalues(const Matrix& a) {
  if (!a.is_square()) throw InputError("symmetric_eigenvalues: matrix is not square");
  if (a.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(view(a)),
                                                    Eigen::EigenvaluesOnly);
  return to_vector(es.eigenvalues());
}

}  // namespace lupi_occ
