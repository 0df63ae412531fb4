#pragma once

#include <vector>

#include "lupi_occ/linalg.hpp"

namespace lupi_occ {

using PointSet = std::vector<Vector>;

enum class KernelKind { Gaussian };

// k(x, y) = exp(-||x - y||^2 / (2 sigma^2)). The width is what hyperparameter
// grids sweep.
class KernelParams {
 public:
  static KernelParams gaussian(double width);

  KernelKind kind() const noexcept { return kind_; }
  double width() const noexcept { return width_; }

  friend bool operator==(const KernelParams&, const KernelParams&) = default;

 private:
  KernelParams(KernelKind kind, double width) : kind_(kind), width_(width) {}

  KernelKind kind_;
  double width_;
};

double kernel_value(const Vector& x, const Vector& y, const KernelParams& p);

// Entry (i, j) is kernel_value(xs[i], ys[j]). Passing the same set twice
// yields an exactly symmetric matrix with unit diagonal.
Matrix kernel_matrix(const PointSet& xs, const PointSet& ys, const KernelParams& p);
Matrix kernel_matrix(const PointSet& xs, const KernelParams& p);

}  // namespace lupi_occ
