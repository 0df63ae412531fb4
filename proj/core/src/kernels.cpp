#include "lupi_occ/kernels.hpp"

#include <cmath>
#include <string>

#include "lupi_occ/errors.hpp"

namespace lupi_occ {

namespace {

double squared_distance(const Vector& x, const Vector& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

std::size_t common_dimension(const PointSet& xs, const char* what) {
  if (xs.empty()) throw InputError(std::string("kernel_matrix: empty ") + what + " point list");
  const std::size_t dim = xs.front().size();
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i].size() != dim) {
      throw InputError(std::string("kernel_matrix: ") + what + " point " + std::to_string(i) +
                       " has dimension " + std::to_string(xs[i].size()) + ", expected " +
                       std::to_string(dim));
    }
  }
  return dim;
}

}  // namespace

KernelParams KernelParams::gaussian(double width) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw InputError("Gaussian kernel width must be positive and finite, got " +
                     std::to_string(width));
  }
  return KernelParams(KernelKind::Gaussian, width);
}

double kernel_value(const Vector& x, const Vector& y, const KernelParams& p) {
  if (x.size() != y.size()) {
    throw InputError("kernel_value: dimension mismatch " + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()));
  }
  const double w = p.width();
  return std::exp(-squared_distance(x, y) / (2.0 * w * w));
}

Matrix kernel_matrix(const PointSet& xs, const PointSet& ys, const KernelParams& p) {
  const std::size_t dx = common_dimension(xs, "left");
  const std::size_t dy = common_dimension(ys, "right");
  if (dx != dy) {
    throw InputError("kernel_matrix: point dimensions differ (" + std::to_string(dx) + " vs " +
                     std::to_string(dy) + ")");
  }
  const double denom = 2.0 * p.width() * p.width();
  std::vector<double> e(xs.size() * ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      e[i * ys.size() + j] = std::exp(-squared_distance(xs[i], ys[j]) / denom);
    }
  }
  return Matrix(xs.size(), ys.size(), std::move(e));
}

Matrix kernel_matrix(const PointSet& xs, const KernelParams& p) {
  common_dimension(xs, "left");
  const std::size_t n = xs.size();
  const double denom = 2.0 * p.width() * p.width();
  std::vector<double> e(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::exp(-squared_distance(xs[i], xs[j]) / denom);
      e[i * n + j] = v;
      e[j * n + i] = v;
    }
  }
  return Matrix(n, n, std::move(e));
}

}  // namespace lupi_occ
