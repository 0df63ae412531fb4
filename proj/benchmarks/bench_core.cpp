#include <benchmark/benchmark.h>

#include <random>

#include "lupi_occ/eval.hpp"
#include "lupi_occ/kernels.hpp"
#include "lupi_occ/linalg.hpp"
#include "lupi_occ/occ.hpp"

using namespace lupi_occ;

namespace {

PointSet random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointSet out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(d);
    for (double& x : v) x = u(rng);
    out.emplace_back(std::move(v));
  }
  return out;
}

void bm_kernel_matrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PointSet x = random_points(n, 13, 1);
  const KernelParams p = KernelParams::gaussian(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_matrix(x, p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_kernel_matrix)->RangeMultiplier(2)->Range(32, 512)->Complexity();

void bm_solve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix k =
      kernel_matrix(random_points(n, 5, 2), KernelParams::gaussian(1.0)) + Matrix::identity(n);
  const Vector b = Vector::constant(n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve(k, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_solve)->RangeMultiplier(2)->Range(32, 512)->Complexity();

void bm_train_kocplus(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PointSet x = random_points(n, 12, 3);
  const PointSet xs = random_points(n, 3, 4);
  const KernelParams p = KernelParams::gaussian(2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_kocplus(x, xs, p, p, 1.0, 1.0, 0.1));
  }
}
BENCHMARK(bm_train_kocplus)->Arg(64)->Arg(128)->Arg(256);

void bm_grid_search(benchmark::State& state) {
  OccTask task;
  task.train_target = random_points(80, 12, 5);
  task.train_priv = random_points(80, 3, 6);
  task.test_points = random_points(40, 12, 7);
  for (std::size_t i = 0; i < 40; ++i) task.test_labels.push_back(i % 2 ? Label::Outlier : Label::Target);
  HyperGrid grid = HyperGrid::defaults();
  grid.sigmas = log_spaced(-2, 2, 4);
  grid.cs = log_spaced(-2, 2, 4);
  grid.mus = log_spaced(-2, 2, 4);
  GridSearchOptions opts;
  opts.threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grid_search(task, grid, Method::KocPlus, opts));
}
BENCHMARK(bm_grid_search)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
