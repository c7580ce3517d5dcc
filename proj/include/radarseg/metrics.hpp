// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "radarseg/errors.hpp"

namespace radarseg {

/// K x K confusion counts; rows are truth classes, columns predictions.
struct ConfusionMatrix {
  int k = 0;
  std::vector<std::int64_t> counts;  // row-major

  explicit ConfusionMatrix(int classes = 0)
      : k(classes), counts(static_cast<std::size_t>(classes) * classes, 0) {}

  std::int64_t& at(int truth, int pred) {
    return counts[static_cast<std::size_t>(truth) * k + pred];
  }
  std::int64_t at(int truth, int pred) const {
    return counts[static_cast<std::size_t>(truth) * k + pred];
  }

  std::int64_t total() const {
    std::int64_t n = 0;
    for (std::int64_t c : counts) n += c;
    return n;
  }

  std::int64_t row_sum(int truth) const {
    std::int64_t n = 0;
    for (int p = 0; p < k; ++p) n += at(truth, p);
    return n;
  }

  std::int64_t col_sum(int pred) const {
    std::int64_t n = 0;
    for (int t = 0; t < k; ++t) n += at(t, pred);
    return n;
  }

  std::int64_t trace() const {
    std::int64_t n = 0;
    for (int c = 0; c < k; ++c) n += at(c, c);
    return n;
  }
};

inline ConfusionMatrix confusion_matrix(const std::vector<int>& pred,
                                        const std::vector<int>& truth, int k) {
  if (pred.size() != truth.size()) {
    throw ConfigError("confusion_matrix: prediction and truth lengths differ");
  }
  if (k < 1) throw ConfigError("confusion_matrix: K must be >= 1");
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= k || pred[i] < 0 || pred[i] >= k) {
      throw ConfigError("confusion_matrix: class code out of range at index " +
                        std::to_string(i));
    }
    ++cm.at(truth[i], pred[i]);
  }
  return cm;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double iou = 0.0;
  std::int64_t support = 0;
};

/// Binary metrics with totalized zero-denominator conventions: no predictions
/// means perfect precision, an absent class means perfect recall, and an
/// empty union counts as full overlap.
inline ClassMetrics binary_metrics(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  ClassMetrics m;
  m.support = tp + fn;
  m.precision = (tp + fp == 0) ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = (tp + fn == 0) ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double pr = m.precision + m.recall;
  m.f1 = (pr == 0.0) ? 0.0 : 2.0 * m.precision * m.recall / pr;
  m.iou = (tp + fp + fn == 0)
              ? 1.0
              : static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
  return m;
}

inline std::vector<ClassMetrics> class_metrics(const ConfusionMatrix& cm) {
  std::vector<ClassMetrics> out;
  out.reserve(static_cast<std::size_t>(cm.k));
  for (int c = 0; c < cm.k; ++c) {
    const std::int64_t tp = cm.at(c, c);
    const std::int64_t fp = cm.col_sum(c) - tp;
    const std::int64_t fn = cm.row_sum(c) - tp;
    out.push_back(binary_metrics(tp, fp, fn));
  }
  return out;
}

inline double accuracy(const ConfusionMatrix& cm) {
  const std::int64_t n = cm.total();
  return n == 0 ? 1.0 : static_cast<double>(cm.trace()) / static_cast<double>(n);
}

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct PrCurve {
  int class_code = 0;
  std::vector<PrPoint> points;
};

/// Evenly spaced thresholds 0, step, 2*step, ... capped at 1.
inline std::vector<double> threshold_grid(double step) {
  if (!(step > 0.0) || step > 1.0) {
    throw ConfigError("threshold_grid: step must be in (0, 1]");
  }
  std::vector<double> grid;
  const int n = static_cast<int>(1.0 / step + 0.5);
  grid.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    grid.push_back(std::min(1.0, static_cast<double>(i) * step));
  }
  if (grid.back() < 1.0) grid.push_back(1.0);
  return grid;
}

/// One-vs-rest precision-recall sweep for class k: at each threshold a point
/// is positive iff its posterior for k reaches the threshold.
inline PrCurve pr_curve(const Eigen::MatrixXd& posteriors,
                        const std::vector<int>& truth, int k,
                        const std::vector<double>& thresholds) {
  const Eigen::Index n = posteriors.rows();
  if (n == 0) throw ConfigError("pr_curve: empty input");
  if (static_cast<std::size_t>(n) != truth.size()) {
    throw ConfigError("pr_curve: posterior and truth lengths differ");
  }
  if (k < 0 || k >= posteriors.cols()) {
    throw ConfigError("pr_curve: class index out of range");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(posteriors.row(i).sum() - 1.0) > 1e-6) {
      throw ConfigError("pr_curve: posterior row " + std::to_string(i) +
                        " does not sum to 1");
    }
  }
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) {
      throw ConfigError("pr_curve: thresholds must be strictly increasing");
    }
  }

  PrCurve curve;
  curve.class_code = k;
  curve.points.reserve(thresholds.size());
  for (double t : thresholds) {
    if (t < 0.0 || t > 1.0) throw InvalidThresholdError("pr_curve: threshold outside [0, 1]");
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool positive = posteriors(i, k) >= t;
      const bool is_class = truth[static_cast<std::size_t>(i)] == k;
      if (positive && is_class) ++tp;
      else if (positive) ++fp;
      else if (is_class) ++fn;
    }
    const ClassMetrics m = binary_metrics(tp, fp, fn);
    curve.points.push_back({t, m.precision, m.recall});
  }
  return curve;
}

}  // namespace radarseg
