#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <set>
#include <sstream>

#include "lupi_occ/csv.hpp"
#include "lupi_occ/data.hpp"
#include "lupi_occ/datasets.hpp"
#include "lupi_occ/errors.hpp"
#include "support/testing.hpp"

using namespace lupi_occ;
using lupi_occ::testing::Gen;
using lupi_occ::testing::ScratchDir;

namespace {

TabularDataset two_class(std::size_t per_class) {
  TabularDataset ds;
  ds.name = "toy";
  ds.feature_names = {"a", "b"};
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const double v = static_cast<double>(i);
    ds.rows.push_back({Vector{v, -v}, i < per_class ? 1 : 2});
  }
  return ds;
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("csv") {
  TEST_CASE("parse_csv handles quotes, doubled quotes, CRLF and blank lines") {
    const CsvTable t = parse_csv("x,\"y, z\"\r\n\r\n1,\"he said \"\"hi\"\"\"\n2,3\n", ',', true);
    CHECK(t.header == std::vector<std::string>{"x", "y, z"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "he said \"hi\"");
    CHECK(t.line_numbers == std::vector<std::size_t>{3, 4});
  }

  TEST_CASE("parse_csv with a blank delimiter splits on runs of blanks") {
    const CsvTable t = parse_csv("  1.0   2.5\t3\n4 5 6\n", ' ', false);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"1.0", "2.5", "3"});
  }

  TEST_CASE("parse_number and format_number") {
    CHECK(parse_number("1.5", 1, 0) == 1.5);
    CHECK(parse_number("-2e3", 1, 0) == -2000.0);
    CHECK_THROWS_AS(parse_number("abc", 3, 1), FormatError);
    CHECK(contains(error_of([] { parse_number("x", 7, 2); }), "line 7, column 3"));
    CHECK_THROWS_AS(parse_number("", 1, 0), FormatError);
    CHECK_THROWS_AS(parse_number("1.0x", 1, 0), FormatError);
    Gen g(41);
    for (int i = 0; i < 500; ++i) {
      const double v = g.uniform(-1e6, 1e6) * std::pow(10.0, g.uniform(-20, 20));
      CHECK(parse_number(format_number(v), 1, 0) == v);
    }
  }
}

TEST_SUITE("data") {
  TEST_CASE("load_csv: three rows, two features") {
    ScratchDir dir("data");
    const auto path = dir.file("t.csv", "f1,f2,label\n1,2,1\n3,4,2\n5.5,6,1\n");
    CsvSchema schema;
    schema.label_column = std::string("label");
    const TabularDataset ds = load_csv(path, schema);
    CHECK(ds.rows.size() == 3);
    CHECK(ds.dimension() == 2);
    CHECK(ds.feature_names == std::vector<std::string>{"f1", "f2"});
    CHECK(ds.rows[2].features == Vector{5.5, 6});
    CHECK(ds.rows[1].label == 2);
    CHECK(ds.distinct_labels() == std::vector<int>{1, 2});
  }

  TEST_CASE("load_csv: error cases") {
    ScratchDir dir("data");
    CsvSchema schema;
    schema.label_column = std::string("label");
    CHECK(contains(error_of([&] { load_csv(dir.file("e.csv", ""), schema); }), "no data rows"));
    CHECK(contains(error_of([&] { load_csv(dir.file("h.csv", "a,label\n"), schema); }),
                   "no data rows"));
    CHECK(contains(error_of([&] { load_csv(dir.file("m.csv", "a,b\n1,2\n"), schema); }),
                   "'label'"));
    const std::string bad = error_of([&] { load_csv(dir.file("b.csv", "a,label\nx,1\n"), schema); });
    CHECK(contains(bad, "line 2"));
    CHECK(contains(bad, "column 1"));
    CHECK_THROWS_AS(load_csv(dir.file("r.csv", "a,label\n1,2,3\n"), schema), FormatError);
    CHECK_THROWS_AS(load_csv(dir.file("l.csv", "a,label\n1,1.5\n"), schema), FormatError);
    CHECK_THROWS_AS(load_csv(dir.path() / "missing.csv", schema), IoError);
  }

  TEST_CASE("load_csv: explicit feature columns by name and index") {
    ScratchDir dir("data");
    const auto path = dir.file("t.csv", "id,x,y,label\n9,1,2,1\n8,3,4,2\n");
    CsvSchema schema;
    schema.label_column = std::size_t{3};
    schema.feature_columns = std::vector<ColumnRef>{std::string("y"), std::size_t{1}};
    const TabularDataset ds = load_csv(path, schema);
    CHECK(ds.feature_names == std::vector<std::string>{"y", "x"});
    CHECK(ds.rows[0].features == Vector{2, 1});
  }

  TEST_CASE("write_csv then load_csv round-trips values bit for bit") {
    Gen g(42);
    TabularDataset ds;
    ds.feature_names = {"p", "q, quoted", "r"};
    for (int i = 0; i < 50; ++i) {
      ds.rows.push_back({g.vector(3, -1e3, 1e3), static_cast<int>(g.index(1, 3))});
    }
    ds.rows.push_back({Vector{0.1, 1e-300, -7}, 1});
    ScratchDir dir("data");
    write_csv(ds, dir.path() / "rt.csv");
    CsvSchema schema;
    schema.label_column = std::string("label");
    const TabularDataset back = load_csv(dir.path() / "rt.csv", schema);
    CHECK(back.feature_names == ds.feature_names);
    REQUIRE(back.rows.size() == ds.rows.size());
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
      CHECK(back.rows[i].features == ds.rows[i].features);
      CHECK(back.rows[i].label == ds.rows[i].label);
    }
  }

  TEST_CASE("encode_group: spec examples") {
    const GroupRule age("age", {40, 50});
    CHECK(encode_group(35, age) == Vector{1, 0, 0});
    CHECK(encode_group(40, age) == Vector{0, 1, 0});
    CHECK(encode_group(55, age) == Vector{0, 0, 1});
    CHECK(encode_group(67, age) == Vector{0, 0, 1});
    const GroupRule height("height", {0.15});
    CHECK(encode_group(0.10, height) == Vector{1, 0});
    CHECK(encode_group(0.20, height) == Vector{0, 1});
    CHECK(encode_group(0.15, height) == Vector{0, 1});
    CHECK(age.group_count() == 3);
  }

  TEST_CASE("encode_group: always one-hot") {
    Gen g(43);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<double> cuts(g.index(0, 5));
      for (double& c : cuts) c = g.uniform(-10, 10);
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      const GroupRule rule("f", cuts);
      const double value = g.pick(std::vector<double>{g.uniform(-12, 12), cuts.empty() ? 0.0 : g.pick(cuts)});
      const Vector v = encode_group(value, rule);
      CHECK(v.size() == rule.group_count());
      double sum = 0;
      int nonzero = 0;
      for (double x : v) {
        sum += x;
        nonzero += x != 0.0;
      }
      CHECK(sum == 1.0);
      CHECK(nonzero == 1);
    }
  }

  TEST_CASE("GroupRule rejects unsorted cuts") {
    CHECK_THROWS_AS(GroupRule("f", {2, 1}), InputError);
    CHECK_THROWS_AS(GroupRule("f", {1, 1}), InputError);
  }

  TEST_CASE("make_occ_task: 80/20 holdout counts") {
    const TabularDataset ds = two_class(10);
    const OccTask t = make_occ_task(ds, 1, HoldoutSplit{0.8, 42});
    CHECK(t.train_target.size() == 8);
    CHECK(t.test_points.size() == 12);
    CHECK(std::count(t.test_labels.begin(), t.test_labels.end(), Label::Target) == 2);
    CHECK(std::count(t.test_labels.begin(), t.test_labels.end(), Label::Outlier) == 10);
    CHECK_FALSE(t.has_priv());
  }

  TEST_CASE("make_occ_task: degenerate splits and absent classes") {
    TabularDataset ds = two_class(5);
    ds.rows.push_back({Vector{100, 100}, 3});
    CHECK(contains(error_of([&] { make_occ_task(ds, 3, HoldoutSplit{0.8, 1}); }),
                   "empty train or test partition"));
    CHECK(contains(error_of([&] { make_occ_task(ds, 7, HoldoutSplit{0.8, 1}); }),
                   "not present"));
  }

  TEST_CASE("make_occ_task: training rows are all target rows, privileged data aligned") {
    Gen g(44);
    for (int trial = 0; trial < 30; ++trial) {
      TabularDataset ds;
      ds.feature_names = {"a", "b", "age"};
      const std::size_t n = g.index(12, 60);
      for (std::size_t i = 0; i < n; ++i) {
        ds.rows.push_back({Vector{g.uniform(0, 1), g.uniform(0, 1), g.uniform(20, 70)},
                           static_cast<int>(i % 3) + 1});
      }
      const GroupAttribute age{"Age", GroupRule("age", {40, 50})};
      const int target = static_cast<int>(g.index(1, 3));
      const OccTask t = make_occ_task(ds, target, KFoldSplit{3, g.index(0, 2), 7}, age);
      REQUIRE(t.has_priv());
      CHECK(t.train_priv->size() == t.train_target.size());
      CHECK(t.feature_names == std::vector<std::string>{"a", "b"});
      for (std::size_t i = 0; i < t.train_target.size(); ++i) {
        CHECK(t.train_target[i].size() == 2);
        // Recover the source row and check its label and group encoding.
        const auto it = std::find_if(ds.rows.begin(), ds.rows.end(), [&](const LabeledRow& r) {
          return r.features[0] == t.train_target[i][0] && r.features[1] == t.train_target[i][1];
        });
        REQUIRE(it != ds.rows.end());
        CHECK(it->label == target);
        CHECK((*t.train_priv)[i] == encode_group(it->features[2], age.rule));
      }
    }
  }

  TEST_CASE("make_occ_task: keep_in_x and raw privileged columns") {
    TabularDataset ds;
    ds.feature_names = {"a", "b", "c"};
    for (int i = 0; i < 10; ++i) ds.rows.push_back({Vector{1.0 * i, 2.0 * i, 3.0 * i}, i % 2 + 1});
    GroupAttribute attr{"B", GroupRule("b", {5}), true};
    const OccTask kept = make_occ_task(ds, 1, HoldoutSplit{0.6, 3}, attr);
    CHECK(kept.train_target.front().size() == 3);
    const OccTask raw =
        make_occ_task(ds, 1, HoldoutSplit{0.6, 3}, PrivilegedColumns{{"c", "a"}, false});
    CHECK(raw.feature_names == std::vector<std::string>{"b"});
    for (std::size_t i = 0; i < raw.train_target.size(); ++i) {
      const double b = raw.train_target[i][0];
      CHECK((*raw.train_priv)[i] == Vector{1.5 * b, 0.5 * b});
    }
    CHECK_THROWS_AS(make_occ_task(ds, 1, HoldoutSplit{}, PrivilegedColumns{{"zzz"}, false}),
                    InputError);
  }

  TEST_CASE("make_training_task keeps every target row and needs no test rows") {
    const TabularDataset ds = two_class(4);
    const OccTask t = make_training_task(ds, 2);
    CHECK(t.train_target.size() == 4);
    CHECK(t.test_points.empty());
    CHECK_THROWS_AS(make_training_task(ds, 3), InputError);
  }

  TEST_CASE("kfold_split: spec examples") {
    const auto folds = kfold_split(10, 5, 42);
    REQUIRE(folds.size() == 5);
    std::set<std::size_t> seen;
    for (const auto& f : folds) {
      CHECK(f.test.size() == 2);
      CHECK(f.train.size() == 8);
      for (std::size_t i : f.test) CHECK(seen.insert(i).second);
    }
    CHECK(seen.size() == 10);
    CHECK(kfold_split(10, 5, 42)[3].test == folds[3].test);
    CHECK_THROWS_AS(kfold_split(10, 11, 42), InputError);
    CHECK_THROWS_AS(kfold_split(10, 1, 42), InputError);
  }

  TEST_CASE("kfold_split: partition property on random sizes") {
    Gen g(45);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = g.index(2, 200);
      const std::size_t k = g.index(2, std::min<std::size_t>(n, 12));
      const auto folds = kfold_split(n, k, g.index(0, 1000));
      std::vector<int> count(n, 0);
      std::size_t lo = n;
      std::size_t hi = 0;
      for (const auto& f : folds) {
        lo = std::min(lo, f.test.size());
        hi = std::max(hi, f.test.size());
        CHECK(f.train.size() + f.test.size() == n);
        for (std::size_t i : f.test) ++count[i];
        std::set<std::size_t> test(f.test.begin(), f.test.end());
        for (std::size_t i : f.train) CHECK(test.count(i) == 0);
      }
      CHECK(hi - lo <= 1);
      CHECK(std::all_of(count.begin(), count.end(), [](int c) { return c == 1; }));
    }
  }

  TEST_CASE("stratified_kfold keeps class proportions") {
    std::vector<int> labels;
    for (int i = 0; i < 150; ++i) labels.push_back(1);
    for (int i = 0; i < 120; ++i) labels.push_back(2);
    const auto folds = stratified_kfold(labels, 5, 42);
    for (const auto& f : folds) {
      const auto ones = std::count_if(f.test.begin(), f.test.end(),
                                      [&](std::size_t i) { return labels[i] == 1; });
      CHECK(ones == 30);
      CHECK(f.test.size() == 54);
    }
  }

  TEST_CASE("seeded_permutation is a deterministic permutation") {
    const auto p = seeded_permutation(100, 9);
    CHECK(p == seeded_permutation(100, 9));
    CHECK(p != seeded_permutation(100, 10));
    std::vector<std::size_t> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < 100; ++i) CHECK(sorted[i] == i);
  }

  TEST_CASE("Standardizer: zero mean, unit scale, constant features left unscaled") {
    const PointSet pts{Vector{1, 5}, Vector{3, 5}, Vector{5, 5}};
    const Standardizer s = Standardizer::fit(pts);
    CHECK(s.means() == std::vector<double>{3, 5});
    CHECK(s.scales()[1] == 1.0);
    const PointSet z = s.apply(pts);
    CHECK(z[0][0] == doctest::Approx(-std::sqrt(1.5)));
    CHECK(z[2][1] == 0.0);
    CHECK_THROWS_AS(s.apply(Vector{1}), InputError);
    CHECK_THROWS_AS(Standardizer::from_parts({1}, {0}), InputError);
  }
}

TEST_SUITE("datasets") {
  TEST_CASE("Statlog Heart file: 270 rows, 13 features, classes 150/120") {
    const auto path = std::filesystem::path(LUPI_OCC_SOURCE_DIR) / "data" / "heart.dat";
    const TabularDataset ds = load_heart(path);
    CHECK(ds.rows.size() == 270);
    CHECK(ds.dimension() == 13);
    CHECK(std::count_if(ds.rows.begin(), ds.rows.end(),
                        [](const LabeledRow& r) { return r.label == 1; }) == 150);
    CHECK(ds.rows[0].features[0] == 70.0);
    CHECK(ds.rows[0].features[9] == 2.4);
    CHECK(ds.rows[0].label == 2);
    for (const auto& attr : heart_group_attributes()) {
      CHECK_NOTHROW(ds.feature_index(attr.rule.source_feature));
    }
  }

  TEST_CASE("heart group attributes use the documented thresholds") {
    const auto attrs = heart_group_attributes();
    REQUIRE(attrs.size() == 3);
    CHECK(attrs[0].name == "Age");
    CHECK(encode_group(39, attrs[0].rule) == Vector{1, 0, 0});
    CHECK(encode_group(45, attrs[0].rule) == Vector{0, 1, 0});
    CHECK(encode_group(59, attrs[0].rule) == Vector{0, 0, 1});
    CHECK(encode_group(0, attrs[1].rule) == Vector{1, 0, 0});
    CHECK(encode_group(1, attrs[1].rule) == Vector{0, 1, 0});
    CHECK(encode_group(2, attrs[1].rule) == Vector{0, 0, 1});
    CHECK(encode_group(0, attrs[2].rule) == Vector{1, 0});
    CHECK(encode_group(1, attrs[2].rule) == Vector{0, 1});
  }

  TEST_CASE("heart loader rejects foreign class labels") {
    ScratchDir dir("heart");
    std::string row = "63 1 1 145 233 1 2 150 0 2.3 3 0 6 ";
    CHECK_THROWS_AS(load_heart(dir.file("h.dat", row + "3\n")), FormatError);
  }

  TEST_CASE("abalone loader: sex encoding and ring classes") {
    ScratchDir dir("abalone");
    const auto path = dir.file("abalone.data",
                               "M,0.455,0.365,0.095,0.514,0.2245,0.101,0.15,15\n"
                               "F,0.53,0.42,0.135,0.677,0.2565,0.1415,0.21,9\n"
                               "I,0.33,0.255,0.08,0.205,0.0895,0.0395,0.055,7\n");
    const TabularDataset ds = load_abalone(path);
    REQUIRE(ds.rows.size() == 3);
    CHECK(ds.rows[0].label == 3);
    CHECK(ds.rows[1].label == 2);
    CHECK(ds.rows[2].label == 1);
    CHECK(ds.rows[1].features[1] == 1.0);
    CHECK(ds.rows[0].features[ds.feature_index("height")] == 0.095);
    CHECK(abalone_class_of_rings(8) == 1);
    CHECK(abalone_class_of_rings(10) == 2);
    CHECK(abalone_class_of_rings(11) == 3);
    for (const auto& attr : abalone_group_attributes()) {
      CHECK_NOTHROW(ds.feature_index(attr.rule.source_feature));
    }
    CHECK_THROWS_AS(load_abalone(dir.file("bad.data", "X,1,1,1,1,1,1,1,9\n")), FormatError);
  }

  TEST_CASE("MNIST loader: partitions, privileged rows and errors") {
    ScratchDir dir("mnist");
    std::ostringstream feats;
    const int labels[] = {5, 8, 5, 8, 5, 8};
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 100; ++c) feats << (r * 100 + c) / 600.0 << ',';
      feats << labels[r] << '\n';
    }
    const auto features = dir.file("f.csv", feats.str());
    const auto split = dir.file("s.txt", "train: 0 1 2 3\nvalidation: 4\ntest: 4 5\n");
    std::string five = "2,1,2,0,1";
    std::string eight = "4,1,1,0,2";
    for (int i = 5; i < 21; ++i) {
      five += ",0";
      eight += ",1";
    }
    const auto priv = dir.file("p.csv", five + "\n" + eight + "\n" + five + "\n" + eight + "\n");

    const OccTask t1 = load_mnist_task(features, priv, split, 1);
    CHECK(t1.train_target.size() == 2);
    CHECK(t1.train_target[0].size() == 100);
    CHECK((*t1.train_priv)[0].size() == 21);
    CHECK((*t1.train_priv)[0][0] == 2);
    CHECK((*t1.train_priv)[0][4] == 1);
    CHECK(t1.test_labels == std::vector<Label>{Label::Target, Label::Outlier});
    CHECK(t1.validation_points.size() == 1);

    const OccTask t2 = load_mnist_task(features, priv, split, 2);
    CHECK((*t2.train_priv)[0][0] == 4);
    CHECK((*t2.train_priv)[0][4] == 2);

    std::string short_row = "1";
    for (int i = 1; i < 20; ++i) short_row += ",1";
    const auto priv20 = dir.file("p20.csv", short_row + "\n" + short_row + "\n" + short_row +
                                                "\n" + short_row + "\n");
    CHECK(contains(error_of([&] { load_mnist_task(features, priv20, split, 1); }),
                   "expected 21 privileged features"));
    const auto priv3 = dir.file("p3.csv", five + "\n" + eight + "\n" + five + "\n");
    const std::string mismatch = error_of([&] { load_mnist_task(features, priv3, split, 1); });
    CHECK(contains(mismatch, "3 rows"));
    CHECK(contains(mismatch, "4"));
    CHECK_THROWS_AS(load_mnist_task(features, priv, dir.file("bad.txt", "train: 0 99\ntest: 1\n"), 1),
                    FormatError);
  }
}
