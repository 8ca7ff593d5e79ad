#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "automl/dataset.hpp"
#include "automl/errors.hpp"
#include "automl/metrics.hpp"
#include "automl/synthetic.hpp"

using namespace automl;

namespace {

const char* kCsv =
    "age,city,income,label\n"
    "34,berlin,50000,yes\n"
    "28,paris,,no\n"
    ",berlin,61000,yes\n"
    "45,\"london, uk\",72000,no\n";

}  // namespace

TEST_CASE("csv columns are typed by content") {
  Dataset d = parse_csv(kCsv, "toy", "label");
  REQUIRE(d.n_columns() == 3);
  CHECK(d.columns[0].kind == ColumnKind::Numeric);  // age
  CHECK(d.columns[1].kind == ColumnKind::Nominal);  // city
  CHECK(d.columns[2].kind == ColumnKind::Numeric);  // income
  CHECK(d.n_rows() == 4);
  CHECK(d.n_classes() == 2);
}

TEST_CASE("missing cells map to NaN and code -1") {
  Dataset d = parse_csv(kCsv, "toy", "label");
  CHECK(std::isnan(d.columns[0].numeric[2]));
  CHECK(std::isnan(d.columns[2].numeric[1]));
}

TEST_CASE("quoted fields keep embedded commas") {
  Dataset d = parse_csv(kCsv, "toy", "label");
  const auto& cats = d.columns[1].categories;
  CHECK(std::find(cats.begin(), cats.end(), "london, uk") != cats.end());
}

TEST_CASE("class names are sorted and labels index into them") {
  Dataset d = parse_csv(kCsv, "toy", "label");
  REQUIRE(d.class_names.size() == 2);
  CHECK(d.class_names[0] == "no");
  CHECK(d.class_names[1] == "yes");
  CHECK(d.labels[0] == 1);
  CHECK(d.labels[1] == 0);
}

TEST_CASE("category codes are sorted lexicographically") {
  Dataset d = parse_csv(kCsv, "toy", "label");
  const auto& cats = d.columns[1].categories;
  CHECK(std::is_sorted(cats.begin(), cats.end()));
}

TEST_CASE("missing target cell is rejected") {
  CHECK_THROWS_AS(parse_csv("a,label\n1,x\n2,\n", "toy", "label"),
                  DataFormatError);
}

TEST_CASE("unknown target column is rejected") {
  CHECK_THROWS_AS(parse_csv(kCsv, "toy", "nope"), DataFormatError);
}

TEST_CASE("single-class data is rejected") {
  CHECK_THROWS_AS(parse_csv("a,label\n1,x\n2,x\n", "toy", "label"),
                  DataFormatError);
}

TEST_CASE("sensitive column must be binary") {
  CHECK_THROWS_AS(
      parse_csv("a,s,label\n1,0,x\n2,1,y\n3,2,x\n", "toy", "label", "s"),
      DataFormatError);
  Dataset ok =
      parse_csv("a,s,label\n1,0,x\n2,1,y\n3,1,x\n", "toy", "label", "s");
  CHECK(ok.has_sensitive());
  CHECK(ok.sensitive == std::vector<int8_t>{0, 1, 1});
}

TEST_CASE("take_rows preserves schema and class inventory") {
  Dataset d = parse_csv(kCsv, "toy", "label");
  Dataset sub = take_rows(d, {0, 2});
  CHECK(sub.n_rows() == 2);
  CHECK(sub.n_columns() == d.n_columns());
  CHECK(sub.n_classes() == 2);  // class "no" vanished from rows, not inventory
  CHECK(sub.labels == std::vector<int32_t>{1, 1});
  CHECK(sub.columns[1].categories == d.columns[1].categories);
  sub.validate();
}

TEST_CASE("take_rows keeps the sensitive attribute aligned") {
  Dataset d =
      parse_csv("a,s,label\n1,0,x\n2,1,y\n3,1,x\n", "toy", "label", "s");
  Dataset sub = take_rows(d, {2, 0});
  CHECK(sub.sensitive == std::vector<int8_t>{1, 0});
}

TEST_CASE("nominal and numeric counts partition the columns") {
  Dataset d = synth::mixed("m", 5, 80);
  CHECK(d.n_nominal() + d.n_numeric() == d.n_columns());
  CHECK(d.n_nominal() > 0);
  CHECK(d.n_numeric() > 0);
  d.validate();
}

TEST_CASE("generators are deterministic per seed") {
  Dataset a = synth::blobs("b", 9, 60, 4, 3, 2.0);
  Dataset b = synth::blobs("b", 9, 60, 4, 3, 2.0);
  CHECK(a.labels == b.labels);
  REQUIRE(a.n_columns() == b.n_columns());
  for (size_t c = 0; c < a.n_columns(); ++c)
    CHECK(a.columns[c].numeric == b.columns[c].numeric);
  Dataset c = synth::blobs("b", 10, 60, 4, 3, 2.0);
  CHECK(a.labels != c.labels);
}

TEST_CASE("bundled repository has eight valid datasets") {
  auto repo = synth::bundled_repository();
  REQUIRE(repo.size() == 8);
  std::set<std::string> names;
  bool any_sensitive = false, any_nominal = false;
  for (const auto& d : repo) {
    d.validate();
    names.insert(d.name);
    CHECK(d.n_rows() >= 60);
    any_sensitive = any_sensitive || d.has_sensitive();
    any_nominal = any_nominal || d.n_nominal() > 0;
  }
  CHECK(names.size() == 8);
  CHECK(any_sensitive);
  CHECK(any_nominal);
}

TEST_CASE("balanced accuracy on perfect predictions") {
  std::vector<int32_t> y{0, 1, 2, 0, 1, 2};
  CHECK(balanced_accuracy(y, y) == doctest::Approx(1.0));
}

TEST_CASE("balanced accuracy averages per-class recall") {
  CHECK(balanced_accuracy({0, 0, 1, 1}, {0, 0, 0, 0}) ==
        doctest::Approx(0.5));
  CHECK(balanced_accuracy({0, 1, 2}, {0, 1, 0}) ==
        doctest::Approx(2.0 / 3.0));
}

TEST_CASE("balanced accuracy ignores classes absent from y_true") {
  // Only classes 0 and 1 appear; a prediction of class 2 is just a miss.
  CHECK(balanced_accuracy({0, 0, 1, 1}, {0, 2, 1, 1}) ==
        doctest::Approx(0.75));
}

TEST_CASE("equal opportunity on identical group TPRs") {
  std::vector<int32_t> y_true{1, 1, 0, 1, 1, 0};
  std::vector<int32_t> y_pred{1, 0, 0, 1, 0, 1};
  std::vector<int8_t> groups{0, 0, 0, 1, 1, 1};
  CHECK(equal_opportunity(y_true, y_pred, groups) == doctest::Approx(1.0));
}

TEST_CASE("equal opportunity with maximal TPR gap") {
  std::vector<int32_t> y_true{1, 1, 1, 1};
  std::vector<int32_t> y_pred{1, 1, 0, 0};
  std::vector<int8_t> groups{0, 0, 1, 1};
  CHECK(equal_opportunity(y_true, y_pred, groups) == doctest::Approx(0.0));
}

TEST_CASE("equal opportunity defaults to 1 without group data") {
  std::vector<int32_t> y{1, 0};
  CHECK(equal_opportunity(y, y, {}) == doctest::Approx(1.0));
  // Positive class missing from group 1: undefined gap reads as fair.
  CHECK(equal_opportunity({1, 0}, {1, 0}, {0, 1}) == doctest::Approx(1.0));
}

TEST_CASE("equal opportunity matches a hand-computed gap") {
  // Group 0 TPR = 2/3, group 1 TPR = 1/2.
  std::vector<int32_t> y_true{1, 1, 1, 0, 1, 1, 0};
  std::vector<int32_t> y_pred{1, 1, 0, 0, 1, 0, 1};
  std::vector<int8_t> groups{0, 0, 0, 0, 1, 1, 1};
  CHECK(equal_opportunity(y_true, y_pred, groups) ==
        doctest::Approx(1.0 - (2.0 / 3.0 - 0.5)));
}
