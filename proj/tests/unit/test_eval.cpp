#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lupi_occ/errors.hpp"
#include "lupi_occ/eval.hpp"
#include "lupi_occ/experiment.hpp"
#include "support/testing.hpp"

using namespace lupi_occ;
using lupi_occ::testing::Gen;

namespace {

constexpr Label T = Label::Target;
constexpr Label O = Label::Outlier;

// Two well-separated blobs: targets near the origin, outliers far away.
OccTask blob_task(Gen& g, std::size_t n_train, std::size_t n_target_test, std::size_t n_outliers,
                  bool with_priv) {
  OccTask t;
  t.target_class = 1;
  t.train_target = g.points(n_train, 2, -1, 1);
  if (with_priv) t.train_priv = g.one_hot(n_train, 3);
  for (std::size_t i = 0; i < n_target_test; ++i) {
    t.test_points.push_back(g.vector(2, -1, 1));
    t.test_labels.push_back(T);
  }
  for (std::size_t i = 0; i < n_outliers; ++i) {
    t.test_points.push_back(g.vector(2, 3, 5));
    t.test_labels.push_back(O);
  }
  return t;
}

HyperGrid small_grid() {
  HyperGrid g;
  g.sigmas = {0.5, 1.0, 2.0};
  g.cs = {0.1, 1.0, 10.0};
  g.mus = {0.1, 1.0};
  g.etas = {0.05, 0.2, 0.5};
  return g;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("precision_score: spec examples") {
    const std::vector<Label> truth{T, O, T, O};
    CHECK(precision_score(truth, truth) == 1.0);
    CHECK(precision_score(std::vector<Label>{O, O, O, O}, truth) == 0.0);
    CHECK(precision_score(std::vector<Label>{T, T, O, O}, truth) == 0.5);
  }

  TEST_CASE("score_predictions: counts, recall, F1 and errors") {
    const auto s = score_predictions(std::vector<Label>{T, T, O, O, T}, std::vector<Label>{T, O, T, O, T});
    CHECK(s.true_positives == 2);
    CHECK(s.false_positives == 1);
    CHECK(s.false_negatives == 1);
    CHECK(s.recall == doctest::Approx(2.0 / 3.0));
    CHECK(s.f1 == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(precision_score(std::vector<Label>{T}, std::vector<Label>{T, O}), InputError);
    CHECK_THROWS_AS(precision_score(std::vector<Label>{}, std::vector<Label>{}), InputError);
  }

  TEST_CASE("precision_score is invariant under joint permutation") {
    Gen g(51);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = g.index(1, 40);
      std::vector<Label> p(n);
      std::vector<Label> t(n);
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = g.uniform(0, 1) < 0.5 ? T : O;
        t[i] = g.uniform(0, 1) < 0.5 ? T : O;
      }
      const double before = precision_score(p, t);
      std::vector<std::size_t> perm = seeded_permutation(n, g.index(0, 1000));
      std::vector<Label> pp(n);
      std::vector<Label> tp(n);
      for (std::size_t i = 0; i < n; ++i) {
        pp[i] = p[perm[i]];
        tp[i] = t[perm[i]];
      }
      CHECK(precision_score(pp, tp) == before);
    }
  }

  TEST_CASE("default grid has the documented ranges") {
    const HyperGrid g = HyperGrid::defaults();
    REQUIRE(g.sigmas.size() == 20);
    CHECK(g.sigmas.front() == doctest::Approx(1e-10).epsilon(1e-12));
    CHECK(g.sigmas.back() == doctest::Approx(1e20).epsilon(1e-12));
    for (std::size_t k = 0; k < 20; ++k) {
      CHECK(std::log10(g.sigmas[k]) == doctest::Approx(-10.0 + 30.0 * k / 19.0).epsilon(1e-12));
    }
    REQUIRE(g.etas.size() == 10);
    CHECK(g.etas.front() == 0.05);
    CHECK(g.etas.back() == 0.7);
    for (std::size_t k = 1; k < 10; ++k) {
      CHECK(g.etas[k] - g.etas[k - 1] == doctest::Approx(0.65 / 9).epsilon(1e-12));
    }
    CHECK(g.cs == g.sigmas);
    CHECK(g.mus == g.sigmas);
    CHECK_NOTHROW(g.validate());
  }

  TEST_CASE("HyperGrid::validate rejects empty or out-of-range lists") {
    HyperGrid g = small_grid();
    g.etas = {};
    CHECK_THROWS_AS(g.validate(), InputError);
    g = small_grid();
    g.etas = {1.5};
    CHECK_THROWS_AS(g.validate(), InputError);
    g = small_grid();
    g.sigmas = {-1};
    CHECK_THROWS_AS(g.validate(), InputError);
    g = small_grid();
    g.mus = {INFINITY};
    CHECK_THROWS_AS(g.validate(), InputError);
  }

  TEST_CASE("grid_search: single-point grid returns that point and its score") {
    Gen g(52);
    const OccTask task = blob_task(g, 20, 5, 5, false);
    HyperGrid grid;
    grid.sigmas = {1.0};
    grid.cs = {2.0};
    grid.mus = {3.0};
    grid.etas = {0.2};
    const auto r = grid_search(task, grid, Method::Koc);
    CHECK(r.best == GridPoint{1.0, 2.0, 0.0, 0.2});
    const KocModel m = train_koc(task.train_target, KernelParams::gaussian(1.0), 2.0, 0.2);
    CHECK(r.validation_precision == precision_score(predict_labels(m, task.test_points),
                                                    task.test_labels));
  }

  TEST_CASE("grid_search: a strictly better configuration wins") {
    Gen g(53);
    const OccTask task = blob_task(g, 30, 10, 10, false);
    HyperGrid grid;
    // A huge width makes every point look alike (outliers accepted); a
    // moderate width separates the blobs.
    grid.sigmas = {1.0, 1e6};
    grid.cs = {10.0};
    grid.mus = {1.0};
    grid.etas = {0.2};
    const auto r = grid_search(task, grid, Method::Koc);
    CHECK(r.best.sigma == 1.0);
    CHECK(r.validation_precision == 1.0);
  }

  TEST_CASE("grid_search: ties go to the lexicographically smallest tuple") {
    // Every configuration predicts everything Target on this task, so all
    // scores tie at the target share of the test set.
    OccTask task;
    task.train_target = {Vector{0}, Vector{0}};
    task.train_priv = PointSet{Vector{0}, Vector{1}};
    task.test_points = {Vector{0}, Vector{0}};
    task.test_labels = {T, O};
    HyperGrid grid;
    grid.sigmas = {3.0, 2.0};
    grid.cs = {5.0, 4.0};
    grid.mus = {7.0, 6.0};
    grid.etas = {0.9, 0.8};
    const auto koc = grid_search(task, grid, Method::Koc);
    CHECK(koc.best == GridPoint{2.0, 4.0, 0.0, 0.8});
    CHECK(koc.validation_precision == 0.5);
    const auto plus = grid_search(task, grid, Method::KocPlus);
    CHECK(plus.best == GridPoint{2.0, 4.0, 6.0, 0.8});
  }

  TEST_CASE("grid_search: KOC+ without privileged features is an error") {
    Gen g(54);
    const OccTask task = blob_task(g, 10, 3, 3, false);
    const std::string what = [&] {
      try {
        grid_search(task, small_grid(), Method::KocPlus);
      } catch (const InputError& e) {
        return std::string(e.what());
      }
      return std::string();
    }();
    CHECK(what.find("privileged features required") != std::string::npos);
  }

  TEST_CASE("grid_search: deterministic, thread count does not change the result") {
    Gen g(55);
    const OccTask task = blob_task(g, 25, 8, 8, true);
    for (Method m : {Method::Koc, Method::KocPlus}) {
      const auto a = grid_search(task, small_grid(), m);
      const auto b = grid_search(task, small_grid(), m);
      GridSearchOptions threaded;
      threaded.threads = 3;
      const auto c = grid_search(task, small_grid(), m, threaded);
      CHECK(a.best == b.best);
      CHECK(a.best == c.best);
      CHECK(a.validation_precision == c.validation_precision);
      CHECK(a.evaluated == c.evaluated);
    }
  }

  TEST_CASE("grid_search: singular configurations are skipped and counted") {
    OccTask task;
    // K is close to I and K* is all ones, so a negligible mu leaves A rank one.
    task.train_target = {Vector{0}, Vector{10}, Vector{20}};
    task.train_priv = PointSet{Vector{0}, Vector{0}, Vector{0}};
    task.test_points = {Vector{0}, Vector{5}};
    task.test_labels = {T, O};
    HyperGrid grid;
    grid.sigmas = {1.0};
    grid.cs = {1e-10, 1.0};
    grid.mus = {1e-14, 1.0};
    grid.etas = {0.5};
    const auto r = grid_search(task, grid, Method::KocPlus);
    CHECK(r.skipped_singular >= 1);
    CHECK(r.evaluated + r.skipped_singular == 4);
    grid.mus = {1e-14};
    CHECK_THROWS_AS(grid_search(task, grid, Method::KocPlus), TrainingError);
  }

  TEST_CASE("grid_search: ranking lists every evaluated point, best first") {
    Gen g(56);
    const OccTask task = blob_task(g, 15, 5, 5, true);
    GridSearchOptions opts;
    opts.keep_ranking = true;
    const auto r = grid_search(task, small_grid(), Method::KocPlus, opts);
    CHECK(r.ranking.size() == r.evaluated * small_grid().etas.size());
    CHECK(r.ranking.front().point == r.best);
    for (std::size_t i = 1; i < r.ranking.size(); ++i) {
      CHECK(r.ranking[i - 1].validation_precision >= r.ranking[i].validation_precision);
    }
  }

  TEST_CASE("K* = I makes KOC+ fold scores identical to KOC at C + mu") {
    Gen g(57);
    for (int trial = 0; trial < 10; ++trial) {
      OccTask task = blob_task(g, 12, 6, 6, false);
      // Distinct one-hot rows and a tiny privileged width give K* = I.
      task.train_priv.emplace();
      for (std::size_t i = 0; i < 12; ++i) {
        std::vector<double> v(12, 0.0);
        v[i] = 1.0;
        task.train_priv->emplace_back(std::move(v));
      }
      const double c = std::pow(10.0, g.uniform(-1, 1));
      const double mu = std::pow(10.0, g.uniform(-1, 1));
      const double sigma = g.uniform(0.5, 2);
      const double eta = g.uniform(0.05, 0.7);
      const auto plus = evaluate_params(task, Method::KocPlus, {sigma, c, mu, eta}, 1e-10);
      const auto koc = evaluate_params(task, Method::Koc, {sigma, c + mu, 0.0, eta});
      CHECK(plus.precision == koc.precision);
      CHECK(plus.true_positives == koc.true_positives);
      CHECK(plus.false_positives == koc.false_positives);
    }
  }

  TEST_CASE("validation_view promotes the validation partition") {
    Gen g(58);
    OccTask task = blob_task(g, 5, 2, 2, false);
    CHECK_THROWS_AS(validation_view(task), InputError);
    task.validation_points = {Vector{0, 0}};
    task.validation_labels = {T};
    const OccTask v = validation_view(task);
    CHECK(v.test_points.size() == 1);
    CHECK_FALSE(v.has_validation());
  }
}
