#include <doctest.h>

#include <cmath>

#include "lupi_occ/errors.hpp"
#include "lupi_occ/kernels.hpp"
#include "support/testing.hpp"

using namespace lupi_occ;
using lupi_occ::testing::Gen;

TEST_SUITE("kernels") {
  TEST_CASE("kernel params validate the width") {
    CHECK(KernelParams::gaussian(2.0).width() == 2.0);
    CHECK_THROWS_AS(KernelParams::gaussian(0.0), InputError);
    CHECK_THROWS_AS(KernelParams::gaussian(-1.0), InputError);
    CHECK_THROWS_AS(KernelParams::gaussian(INFINITY), InputError);
    CHECK_THROWS_AS(KernelParams::gaussian(NAN), InputError);
  }

  TEST_CASE("kernel_value: spec examples") {
    const Vector x{0.3, -1.2};
    CHECK(kernel_value(x, x, KernelParams::gaussian(1e-10)) == 1.0);
    CHECK(kernel_value(x, x, KernelParams::gaussian(1e20)) == 1.0);
    // 2 sigma^2 = 1
    const double v = kernel_value(Vector{0}, Vector{1}, KernelParams::gaussian(std::sqrt(0.5)));
    CHECK(v == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(v == doctest::Approx(0.367879).epsilon(1e-6));
    CHECK(kernel_value(Vector{-3, 5}, Vector{4, -2}, KernelParams::gaussian(1e20)) >= 1 - 1e-10);
  }

  TEST_CASE("kernel_value: dimension mismatch") {
    CHECK_THROWS_AS(kernel_value(Vector{1}, Vector{1, 2}, KernelParams::gaussian(1)), InputError);
  }

  TEST_CASE("kernel_value: matches the direct formula, is symmetric and lies in (0, 1]") {
    Gen g(11);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t d = g.index(1, 6);
      const Vector x = g.vector(d, -2, 2);
      const Vector y = g.vector(d, -2, 2);
      const double sigma = std::pow(10.0, g.uniform(-0.5, 1.5));
      const KernelParams p = KernelParams::gaussian(sigma);
      const double v = kernel_value(x, y, p);
      CHECK(v == doctest::Approx(lupi_occ::testing::naive_kernel(x, y, sigma)).epsilon(1e-13));
      CHECK(v == kernel_value(y, x, p));
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
    }
  }

  TEST_CASE("kernel_value: strictly increasing in the width for distinct points") {
    Gen g(12);
    for (int trial = 0; trial < 100; ++trial) {
      const Vector x = g.vector(3);
      const Vector y = g.vector(3);
      const double s1 = g.uniform(0.2, 3.0);
      const double s2 = s1 * g.uniform(1.05, 2.0);
      CHECK(kernel_value(x, y, KernelParams::gaussian(s1)) <
            kernel_value(x, y, KernelParams::gaussian(s2)));
    }
  }

  TEST_CASE("kernel_matrix: small examples") {
    const KernelParams p = KernelParams::gaussian(0.7);
    CHECK(kernel_matrix(PointSet{Vector{1, 2}}, p) == Matrix{{1.0}});
    CHECK(kernel_matrix(PointSet{Vector{1, 2}, Vector{1, 2}}, p) == Matrix{{1, 1}, {1, 1}});
    CHECK_THROWS_AS(kernel_matrix(PointSet{}, p), InputError);
    CHECK_THROWS_AS(kernel_matrix(PointSet{Vector{1}}, PointSet{}, p), InputError);
    CHECK_THROWS_AS(kernel_matrix(PointSet{Vector{1}, Vector{1, 2}}, p), InputError);
    CHECK_THROWS_AS(kernel_matrix(PointSet{Vector{1}}, PointSet{Vector{1, 2}}, p), InputError);
  }

  TEST_CASE("kernel_matrix: cross matrix entries equal kernel_value") {
    Gen g(13);
    const PointSet xs = g.points(4, 3);
    const PointSet ys = g.points(6, 3);
    const KernelParams p = KernelParams::gaussian(0.9);
    const Matrix k = kernel_matrix(xs, ys, p);
    REQUIRE(k.rows() == 4);
    REQUIRE(k.cols() == 6);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 6; ++j) CHECK(k(i, j) == kernel_value(xs[i], ys[j], p));
  }

  TEST_CASE("kernel_matrix: self kernel of 10 random points is symmetric and PSD") {
    Gen g(14);
    const Matrix k = kernel_matrix(g.points(10, 4), KernelParams::gaussian(0.8));
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 10; ++j) CHECK(std::abs(k(i, j) - k(j, i)) <= 1e-15);
    const Vector ev = symmetric_eigenvalues(k);
    CHECK(ev[0] >= -1e-10);
  }
}
