#pragma once

// Dense real vectors and matrices plus the handful of solves the closed-form
// trainers need. Storage is row-major; values are immutable once built and
// always finite.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace lupi_occ {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::vector<double> values);
  Vector(std::initializer_list<double> values);

  static Vector constant(std::size_t n, double value);
  static Vector zeros(std::size_t n) { return constant(n, 0.0); }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& to_std() const noexcept { return values_; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> values_;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t rows, std::size_t cols);
  static Matrix from_rows(std::span<const Vector> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(entries_).subspan(i * cols_, cols_);
  }
  std::span<const double> entries() const noexcept { return entries_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

/// Relative singular-value cutoff used by min_norm_solve when none is given.
inline constexpr double kDefaultRankTolerance = 1e-10;
/// A pivot smaller than this times the largest entry of the system marks it singular.
inline constexpr double kSingularPivotRatio = 1e-12;

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// Row-by-row dot products in a fixed summation order, so identical rows give
// bit-identical results regardless of the matrix they sit in.
Vector matvec(const Matrix& a, const Vector& x);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& a);

double dot(const Vector& a, const Vector& b);
double norm_inf(const Vector& v);
double norm2(const Vector& v);
double max_abs(const Matrix& a);

// General square solve via LU with partial pivoting. Throws
// SingularMatrixError (carrying the pivot index) when a pivot falls below
// kSingularPivotRatio times the largest entry of `a`.
Vector solve(const Matrix& a, const Vector& b);

// Minimum-norm least-squares solution of a·x ≈ b. Singular values at or
// below tol·σ_max are treated as zero. Total: an all-zero matrix yields 0.
Vector min_norm_solve(const Matrix& a, const Vector& b, double tol = kDefaultRankTolerance);

// Eigenvalues of a symmetric matrix in ascending order (diagnostics and tests).
Vector symmetric_eigenvalues(const Matrix& a);

}  // namespace lupi_occ
