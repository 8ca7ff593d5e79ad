#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "automl/dataset.hpp"
#include "automl/errors.hpp"
#include "automl/metafeatures.hpp"
#include "automl/search_space.hpp"
#include "automl/synthetic.hpp"

using namespace automl;

TEST_CASE("dataset features on a balanced two-class table") {
  Dataset d = parse_csv("f,label\n1,a\n2,b\n3,a\n4,b\n", "bal", "label");
  std::vector<double> v = dataset_features(d);
  REQUIRE(v.size() == 12);
  CHECK(v[0] == doctest::Approx(4.0));                 // rows
  CHECK(v[1] == doctest::Approx(std::log(4.0)));
  CHECK(v[2] == doctest::Approx(1.0));                 // feature columns
  CHECK(v[3] == doctest::Approx(0.0));
  CHECK(v[4] == doctest::Approx(2.0));                 // classes
  CHECK(v[5] == doctest::Approx(std::log(2.0)));       // entropy
  CHECK(v[6] == doctest::Approx(0.5));                 // p min
  CHECK(v[7] == doctest::Approx(0.5));                 // p max
  CHECK(v[8] == doctest::Approx(0.5));                 // p mean
  CHECK(v[9] == doctest::Approx(0.0));                 // p std
  CHECK(v[10] == doctest::Approx(0.25));               // features per row
  CHECK(v[11] == doctest::Approx(0.0));                // nominal ratio
}

TEST_CASE("dataset features track imbalance") {
  Dataset d = parse_csv("f,label\n1,a\n2,a\n3,a\n4,b\n", "imb", "label");
  std::vector<double> v = dataset_features(d);
  double expect_entropy = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
  CHECK(v[5] == doctest::Approx(expect_entropy));
  CHECK(v[6] == doctest::Approx(0.25));
  CHECK(v[7] == doctest::Approx(0.75));
  CHECK(v[8] == doctest::Approx(0.5));
  CHECK(v[9] == doctest::Approx(0.25));
}

TEST_CASE("dataset features count column kinds") {
  Dataset blob = synth::blobs("feat", 2, 100, 4, 2, 1.0);
  std::vector<double> v = dataset_features(blob);
  CHECK(v[0] == doctest::Approx(100.0));
  CHECK(v[2] == doctest::Approx(4.0));
  CHECK(v[10] == doctest::Approx(0.04));
  CHECK(v[11] == doctest::Approx(0.0));

  Dataset m = synth::mixed("featmix", 3, 60);
  std::vector<double> mv = dataset_features(m);
  CHECK(mv[11] ==
        doctest::Approx(double(m.n_nominal()) / double(m.n_numeric())));

  CHECK_THROWS_AS(dataset_features(take_rows(blob, {})), InvalidInputError);
}

TEST_CASE("absent constraints encode as no-demand sentinels") {
  ConstraintSet c;
  c.search_time_s = 300.0;
  std::vector<double> v = constraint_features(c);
  REQUIRE(v.size() == 5);
  CHECK(v[0] == doctest::Approx(300.0));
  CHECK(v[1] == doctest::Approx(kUnconstrainedUpperSentinel));
  CHECK(v[2] == doctest::Approx(kUnconstrainedUpperSentinel));
  CHECK(v[3] == doctest::Approx(kUnconstrainedUpperSentinel));
  CHECK(v[4] == doctest::Approx(kUnconstrainedLowerSentinel));
}

TEST_CASE("present constraints encode verbatim in fixed order") {
  ConstraintSet c;
  c.search_time_s = 60.0;
  c.training_time_s = 5.0;
  c.inference_time_s = 1e-4;
  c.pipeline_size_bytes = 1e6;
  c.equal_opportunity_min = 0.9;
  std::vector<double> v = constraint_features(c);
  CHECK(v == std::vector<double>{60.0, 5.0, 1e-4, 1e6, 0.9});
}

TEST_CASE("custom constraint slots follow the given name order") {
  ConstraintSet c;
  c.search_time_s = 10.0;
  c.customs["b"] = 5.0;
  std::vector<double> v = constraint_features(c, {"a", "b"});
  REQUIRE(v.size() == 7);
  CHECK(v[5] == doctest::Approx(kUnconstrainedUpperSentinel));
  CHECK(v[6] == doctest::Approx(5.0));
}

TEST_CASE("encode concatenates blocks at a fixed width") {
  SearchSpaceTree tree = build_default_space();
  Dataset d = synth::blobs("enc", 4, 50, 3, 2, 1.0);
  ConstraintSet c;
  c.search_time_s = 30.0;
  AutoMLConfiguration omega;
  omega.mask = all_active_mask(tree);

  std::vector<double> v = encode(tree, d, c, omega);
  REQUIRE(v.size() == 12 + 5 + 4 + tree.size());
  CHECK(v[17] == doctest::Approx(omega.holdout_fraction));
  CHECK(v[18] == doctest::Approx(1.0));
  CHECK(v[19] == doctest::Approx(1.0));
  CHECK(v[20] == doctest::Approx(0.0));
  for (size_t i = 21; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(1.0));

  std::vector<double> with_custom = encode(tree, d, c, omega, {"x"});
  CHECK(with_custom.size() == v.size() + 1);

  CHECK(encode(tree, d, c, omega) == v);
}

TEST_CASE("one configuration knob moves one encode coordinate") {
  SearchSpaceTree tree = build_default_space();
  Dataset d = synth::blobs("knob", 5, 50, 3, 2, 1.0);
  ConstraintSet c;
  c.search_time_s = 30.0;
  AutoMLConfiguration omega;
  omega.mask = all_active_mask(tree);

  std::vector<double> base = encode(tree, d, c, omega);
  AutoMLConfiguration tweaked = omega;
  tweaked.holdout_fraction = 0.5;
  std::vector<double> moved = encode(tree, d, c, tweaked);
  size_t diffs = 0, where = 0;
  for (size_t i = 0; i < base.size(); ++i) {
    if (base[i] != moved[i]) {
      ++diffs;
      where = i;
    }
  }
  CHECK(diffs == 1);
  CHECK(where == 17);

  tweaked = omega;
  tweaked.use_ensemble = false;
  moved = encode(tree, d, c, tweaked);
  diffs = 0;
  for (size_t i = 0; i < base.size(); ++i)
    if (base[i] != moved[i]) ++diffs;
  CHECK(diffs == 1);
}

TEST_CASE("encode rejects an unnormalized mask") {
  SearchSpaceTree tree = build_default_space();
  Dataset d = synth::blobs("mask", 6, 40, 3, 2, 1.0);
  ConstraintSet c;
  c.search_time_s = 30.0;
  AutoMLConfiguration omega;
  omega.mask = all_active_mask(tree);
  omega.mask.bits[tree.index_of("classifier")] = 0;
  CHECK_THROWS_AS(encode(tree, d, c, omega), InvalidMaskError);
}

TEST_CASE("curve lookup steps at the recorded times") {
  CalibrationCurve c;
  c.time_s = {1.0, 3.0};
  c.ba = {0.5, 0.7};
  CHECK(c.value_at(0.5) == doctest::Approx(0.0));
  CHECK(c.value_at(1.0) == doctest::Approx(0.5));
  CHECK(c.value_at(2.0) == doctest::Approx(0.5));
  CHECK(c.value_at(3.0) == doctest::Approx(0.7));
  CHECK(c.value_at(99.0) == doctest::Approx(0.7));
}

TEST_CASE("curve csv round-trips") {
  CalibrationCurve c;
  c.time_s = {0.125, 2.5, 11.0};
  c.ba = {0.25, 0.5, 0.8125};
  CalibrationCurve back = CalibrationCurve::from_csv(c.to_csv());
  CHECK(back.time_s == c.time_s);
  CHECK(back.ba == c.ba);
}

TEST_CASE("curve parsing sorts points and enforces the monotone envelope") {
  CalibrationCurve c = CalibrationCurve::from_csv(
      "time_s,balanced_accuracy\n3,0.4\n1,0.5\n2,0.3\n");
  CHECK(c.time_s == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(c.ba == std::vector<double>{0.5, 0.5, 0.5});

  CalibrationCurve dup = CalibrationCurve::from_csv(
      "time_s,balanced_accuracy\n1,0.2\n1,0.4\n");
  CHECK(dup.time_s == std::vector<double>{1.0});
  CHECK(dup.ba == std::vector<double>{0.4});

  CHECK_THROWS_AS(CalibrationCurve::from_csv("1,0.5\n"), DataFormatError);
  CHECK_THROWS_AS(
      CalibrationCurve::from_csv("time_s,balanced_accuracy\nnope\n"),
      DataFormatError);
  CHECK_THROWS_AS(
      CalibrationCurve::from_csv("time_s,balanced_accuracy\n1,zebra\n"),
      DataFormatError);
  CHECK_THROWS_AS(CalibrationCurve::from_csv("time_s,balanced_accuracy\n"),
                  DataFormatError);
}

TEST_CASE("calibration maps a target time to the matching source time") {
  CalibrationCurve target;
  target.time_s = {2.0, 6.0};
  target.ba = {0.5, 0.7};
  // Source reaches every level in half the time.
  CalibrationCurve source;
  source.time_s = {1.0, 3.0};
  source.ba = {0.5, 0.7};

  CHECK(calibrate(source, target, 2.0) == doctest::Approx(1.0));
  CHECK(calibrate(source, target, 6.0) == doctest::Approx(3.0));
  CHECK(calibrate(source, target, 4.0) == doctest::Approx(1.0));

  // Identity mapping on the curve's own grid.
  CHECK(calibrate(target, target, 2.0) == doctest::Approx(2.0));
  CHECK(calibrate(target, target, 6.0) == doctest::Approx(6.0));

  // A level the source never reaches clamps to its last point.
  CalibrationCurve strong;
  strong.time_s = {1.0};
  strong.ba = {0.9};
  CHECK(calibrate(source, strong, 1.0) == doctest::Approx(3.0));

  // Before the target's first point the needed level is zero.
  CHECK(calibrate(source, target, 0.5) == doctest::Approx(1.0));

  CHECK_THROWS_AS(calibrate(CalibrationCurve{}, target, 1.0),
                  InvalidInputError);
  CHECK_THROWS_AS(calibrate(source, CalibrationCurve{}, 1.0),
                  InvalidInputError);
}

TEST_CASE("curve building averages runs into a monotone envelope") {
  SearchSpaceTree tree = build_default_space();
  AutoMLConfiguration omega;
  omega.mask = all_active_mask(tree);
  std::vector<Dataset> datasets{synth::blobs("curve", 7, 80, 3, 2, 2.0)};

  CalibrationCurve c = build_curve(tree, datasets, omega, 0.5, 2, 3);
  REQUIRE_FALSE(c.time_s.empty());
  for (size_t i = 1; i < c.time_s.size(); ++i) {
    CHECK(c.time_s[i] > c.time_s[i - 1]);
    CHECK(c.ba[i] >= c.ba[i - 1]);
  }
  for (double b : c.ba) {
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
  }

  CalibrationCurve again = build_curve(tree, datasets, omega, 0.5, 2, 3);
  CHECK(again.time_s == c.time_s);
  CHECK(again.ba == c.ba);

  CHECK_THROWS_AS(build_curve(tree, datasets, omega, 0.0, 1, 3),
                  InvalidInputError);
  CHECK_THROWS_AS(build_curve(tree, {}, omega, 1.0, 1, 3), InvalidInputError);
  CHECK_THROWS_AS(build_curve(tree, datasets, omega, 1.0, 0, 3),
                  InvalidInputError);
}
