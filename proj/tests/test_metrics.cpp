// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "radarseg/metrics.hpp"

using namespace radarseg;
using Catch::Matchers::WithinAbs;

TEST_CASE("confusion matrix counts truth rows against predicted columns") {
  const std::vector<int> pred = {0, 0, 1, 2, 1, 1};
  const std::vector<int> truth = {0, 1, 1, 2, 1, 0};
  const ConfusionMatrix cm = confusion_matrix(pred, truth, 3);
  REQUIRE(cm.at(0, 0) == 1);  // truth 0 predicted 0
  REQUIRE(cm.at(0, 1) == 1);  // truth 0 predicted 1
  REQUIRE(cm.at(1, 0) == 1);
  REQUIRE(cm.at(1, 1) == 2);
  REQUIRE(cm.at(2, 2) == 1);
  REQUIRE(cm.total() == 6);
  REQUIRE(cm.trace() == 4);
  REQUIRE(cm.row_sum(1) == 3);
  REQUIRE(cm.col_sum(1) == 3);
  REQUIRE_THAT(accuracy(cm), WithinAbs(4.0 / 6.0, 1e-12));
}

TEST_CASE("confusion matrix guards") {
  REQUIRE_THROWS_AS(confusion_matrix({0}, {0, 1}, 2), ConfigError);
  REQUIRE_THROWS_AS(confusion_matrix({2}, {0}, 2), ConfigError);
  REQUIRE_THROWS_AS(confusion_matrix({0}, {-1}, 2), ConfigError);
}

TEST_CASE("binary metrics from hand-counted cases") {
  SECTION("ordinary counts") {
    const ClassMetrics m = binary_metrics(6, 2, 3);
    REQUIRE_THAT(m.precision, WithinAbs(6.0 / 8.0, 1e-12));
    REQUIRE_THAT(m.recall, WithinAbs(6.0 / 9.0, 1e-12));
    const double f1 = 2.0 * (6.0 / 8.0) * (6.0 / 9.0) / (6.0 / 8.0 + 6.0 / 9.0);
    REQUIRE_THAT(m.f1, WithinAbs(f1, 1e-12));
    REQUIRE_THAT(m.iou, WithinAbs(6.0 / 11.0, 1e-12));
  }
  SECTION("zero-denominator conventions") {
    // Nothing predicted for the class: precision defaults to 1.
    const ClassMetrics no_pred = binary_metrics(0, 0, 4);
    REQUIRE(no_pred.precision == 1.0);
    REQUIRE(no_pred.recall == 0.0);
    REQUIRE(no_pred.iou == 0.0);
    // Class absent from truth: recall defaults to 1.
    const ClassMetrics no_truth = binary_metrics(0, 4, 0);
    REQUIRE(no_truth.recall == 1.0);
    REQUIRE(no_truth.precision == 0.0);
    // Nothing anywhere: empty union counts as perfect overlap.
    const ClassMetrics empty = binary_metrics(0, 0, 0);
    REQUIRE(empty.precision == 1.0);
    REQUIRE(empty.recall == 1.0);
    REQUIRE(empty.iou == 1.0);
    REQUIRE(empty.f1 == 1.0);
  }
}

TEST_CASE("the f1/iou identity holds wherever both are defined") {
  for (std::int64_t tp : {0, 1, 5, 50}) {
    for (std::int64_t fp : {0, 1, 3, 20}) {
      for (std::int64_t fn : {0, 1, 4, 10}) {
        const ClassMetrics m = binary_metrics(tp, fp, fn);
        if (m.f1 > 0.0) {
          REQUIRE_THAT(m.iou, WithinAbs(m.f1 / (2.0 - m.f1), 1e-12));
        }
      }
    }
  }
}

TEST_CASE("per-class metrics agree with one-vs-rest hand counting") {
  const std::vector<int> pred = {0, 0, 1, 2, 1, 1, 2, 0};
  const std::vector<int> truth = {0, 1, 1, 2, 1, 0, 2, 0};
  const ConfusionMatrix cm = confusion_matrix(pred, truth, 3);
  const std::vector<ClassMetrics> per_class = class_metrics(cm);
  REQUIRE(per_class.size() == 3);

  // Class 0: tp=2 (rows 0,7), fp=1 (row 5 predicted 0, truth 1... recount):
  // pairs (pred,truth): (0,0)(0,1)(1,1)(2,2)(1,1)(1,0)(2,2)(0,0)
  // class 0: tp=2, fp=1 (the (0,1) pair), fn=1 (the (1,0) pair)
  REQUIRE_THAT(per_class[0].precision, WithinAbs(2.0 / 3.0, 1e-12));
  REQUIRE_THAT(per_class[0].recall, WithinAbs(2.0 / 3.0, 1e-12));
  REQUIRE_THAT(per_class[0].iou, WithinAbs(2.0 / 4.0, 1e-12));
  REQUIRE(per_class[0].support == 3);
  // Class 2: perfect.
  REQUIRE(per_class[2].precision == 1.0);
  REQUIRE(per_class[2].recall == 1.0);
  REQUIRE(per_class[2].iou == 1.0);
  REQUIRE(per_class[2].support == 2);
}

TEST_CASE("threshold grid is inclusive, increasing, and capped at one") {
  const std::vector<double> grid = threshold_grid(0.25);
  REQUIRE(grid.size() == 5);
  REQUIRE(grid.front() == 0.0);
  REQUIRE(grid.back() == 1.0);
  for (std::size_t i = 1; i < grid.size(); ++i) REQUIRE(grid[i] > grid[i - 1]);

  // A step that does not divide 1 still ends exactly at 1.
  const std::vector<double> uneven = threshold_grid(0.3);
  REQUIRE(uneven.back() == 1.0);
  REQUIRE_THROWS_AS(threshold_grid(0.0), ConfigError);
  REQUIRE_THROWS_AS(threshold_grid(-0.5), ConfigError);
}

TEST_CASE("precision/recall sweep against hand counts") {
  // Four points, two classes; class-1 posteriors chosen by hand.
  Eigen::MatrixXd posteriors(4, 2);
  posteriors << 0.9, 0.1,   // truth 0
      0.4, 0.6,             // truth 1
      0.2, 0.8,             // truth 1
      0.3, 0.7;             // truth 0
  const std::vector<int> truth = {0, 1, 1, 0};
  const std::vector<double> thresholds = {0.0, 0.65, 1.0};

  const PrCurve curve = pr_curve(posteriors, truth, 1, thresholds);
  REQUIRE(curve.class_code == 1);
  REQUIRE(curve.points.size() == 3);

  // t=0: every point is declared positive: tp=2, fp=2, fn=0.
  REQUIRE_THAT(curve.points[0].precision, WithinAbs(0.5, 1e-12));
  REQUIRE_THAT(curve.points[0].recall, WithinAbs(1.0, 1e-12));
  // t=0.65: positives are the 0.8 and 0.7 points: tp=1, fp=1, fn=1.
  REQUIRE_THAT(curve.points[1].precision, WithinAbs(0.5, 1e-12));
  REQUIRE_THAT(curve.points[1].recall, WithinAbs(0.5, 1e-12));
  // t=1: nothing reaches it: tp=0, fp=0 -> precision 1 by convention.
  REQUIRE_THAT(curve.points[2].precision, WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(curve.points[2].recall, WithinAbs(0.0, 1e-12));
}

TEST_CASE("precision/recall sweep guards") {
  Eigen::MatrixXd posteriors(2, 2);
  posteriors << 0.5, 0.5, 0.9, 0.1;
  const std::vector<int> truth = {0, 1};
  REQUIRE_THROWS_AS(pr_curve(posteriors, truth, 1, {-0.1, 0.5}), InvalidThresholdError);
  REQUIRE_THROWS_AS(pr_curve(posteriors, truth, 1, {0.5, 1.5}), InvalidThresholdError);
  REQUIRE_THROWS_AS(pr_curve(posteriors, truth, 1, {0.5, 0.5}), ConfigError);
  REQUIRE_THROWS_AS(pr_curve(posteriors, truth, 3, {0.0, 1.0}), ConfigError);
  Eigen::MatrixXd bad = posteriors;
  bad(0, 0) = 0.9;  // row no longer sums to 1
  REQUIRE_THROWS_AS(pr_curve(bad, truth, 1, {0.0, 1.0}), ConfigError);
  REQUIRE_THROWS_AS(pr_curve(Eigen::MatrixXd(0, 2), {}, 1, {0.0, 1.0}), ConfigError);
}
