// SPDX-License-Identifier: Apache-2.0
//
// End-to-end orchestration: pooled feature extraction over frame sets, model
// fitting, per-point prediction, and the associate-then-evaluate workflow.
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "radarseg/errors.hpp"
#include "radarseg/features.hpp"
#include "radarseg/gmm.hpp"
#include "radarseg/io.hpp"
#include "radarseg/labeling.hpp"
#include "radarseg/metrics.hpp"
#include "radarseg/types.hpp"

namespace radarseg {

/// Feature matrix over every point of a frame set, with a row-to-point map.
struct PooledFeatures {
  Eigen::MatrixXd x;  // N x 5, frame order then point order
  std::vector<std::pair<std::size_t, std::size_t>> origin;  // (frame index, point index)
};

inline PooledFeatures pool_frame_features(const FrameSet& set) {
  PooledFeatures pooled;
  pooled.x.resize(static_cast<Eigen::Index>(set.total_points()), kFeatureDim);
  pooled.origin.reserve(set.total_points());
  Eigen::Index row = 0;
  for (std::size_t fi = 0; fi < set.frames.size(); ++fi) {
    for (const FrameFeature& ff : extract_frame_features(set.frames[fi])) {
      pooled.x.row(row++) = ff.features.to_vector().transpose();
      pooled.origin.emplace_back(fi, ff.point_index);
    }
  }
  return pooled;
}

/// Truth class codes in the same row order pool_frame_features produces.
inline std::vector<int> flatten_truth(const FrameSet& set) {
  if (!set.truth) throw ConfigError("frame set carries no truth labels");
  std::vector<int> out;
  out.reserve(set.total_points());
  for (const std::vector<int>& frame_truth : *set.truth) {
    out.insert(out.end(), frame_truth.begin(), frame_truth.end());
  }
  return out;
}

/// Fit a mixture on every pooled point of the training frames.
inline std::pair<GmmModel, FitReport> run_fit(const FrameSet& train, const FitConfig& config) {
  config.validate();
  train.validate();
  const PooledFeatures pooled = pool_frame_features(train);
  if (pooled.x.rows() == 0) throw ConfigError("training input contains no points");
  return fit_em(pooled.x, config);
}

/// MAP cluster index per row (unnormalized log scores, lowest index on ties).
inline std::vector<int> predict_clusters(const GmmModel& model, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd scores = log_weighted_densities(model.params, x);
  std::vector<int> clusters(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    clusters[static_cast<std::size_t>(i)] = detail::argmax_lowest_tie(scores.row(i));
  }
  return clusters;
}

struct PointPrediction {
  std::int64_t frame_id = 0;
  std::size_t point_index = 0;
  int cluster = 0;
  std::optional<int> class_code;
};

/// Per-point MAP predictions over a frame set; class codes attach when the
/// model carries a label map.
inline std::vector<PointPrediction> predict_frame_set(const GmmModel& model,
                                                      const FrameSet& set) {
  set.validate();
  const PooledFeatures pooled = pool_frame_features(set);
  const std::vector<int> clusters = predict_clusters(model, pooled.x);
  std::vector<PointPrediction> out;
  out.reserve(clusters.size());
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    PointPrediction p;
    p.frame_id = set.frames[pooled.origin[i].first].frame_id;
    p.point_index = pooled.origin[i].second;
    p.cluster = clusters[i];
    if (model.label_map) p.class_code = model.label_map->class_of(clusters[i]);
    out.push_back(p);
  }
  return out;
}

inline void write_predictions_csv(std::ostream& out,
                                  const std::vector<PointPrediction>& predictions) {
  const bool with_class =
      !predictions.empty() && predictions.front().class_code.has_value();
  out << (with_class ? "frame_id,point_index,cluster,class_code,class_name\n"
                     : "frame_id,point_index,cluster\n");
  for (const PointPrediction& p : predictions) {
    out << p.frame_id << ',' << p.point_index << ',' << p.cluster;
    if (with_class) out << ',' << *p.class_code << ',' << class_name(*p.class_code);
    out << '\n';
  }
}

/// Everything the evaluate workflow produces in one pass.
struct EvalReport {
  LabelMap label_map;
  bool label_map_from_model = false;
  ConfusionMatrix confusion;
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  std::vector<PrCurve> curves;
  std::int64_t total_points = 0;
};

/// Predict, associate clusters to truth classes (reusing a label map already
/// stored in the model when present), and aggregate point-weighted metrics
/// over the whole set.
inline EvalReport run_evaluate(const GmmModel& model, const FrameSet& test,
                               double threshold_step = 0.05) {
  test.validate();
  if (!test.truth) throw ConfigError("evaluation requires truth labels");
  const PooledFeatures pooled = pool_frame_features(test);
  if (pooled.x.rows() == 0) throw ConfigError("evaluation input contains no points");

  const int k = model.params.k();
  const std::vector<int> truth = flatten_truth(test);
  for (int code : truth) {
    if (code >= k) {
      throw ConfigError("truth contains class code " + std::to_string(code) +
                        " but the model has only " + std::to_string(k) + " components");
    }
  }

  const std::vector<int> clusters = predict_clusters(model, pooled.x);

  EvalReport report;
  if (model.label_map) {
    report.label_map = *model.label_map;
    report.label_map_from_model = true;
  } else {
    report.label_map = associate_labels(clusters, truth, k);
  }

  std::vector<int> predicted(clusters.size());
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    predicted[i] = report.label_map.class_of(clusters[i]);
  }

  report.confusion = confusion_matrix(predicted, truth, k);
  report.per_class = class_metrics(report.confusion);
  report.accuracy = accuracy(report.confusion);
  report.total_points = report.confusion.total();

  // One-vs-rest curves on class-aligned posteriors.
  const Eigen::MatrixXd resp = e_step(model.params, pooled.x);
  Eigen::MatrixXd class_posteriors(resp.rows(), k);
  for (int c = 0; c < k; ++c) {
    class_posteriors.col(c) = resp.col(report.label_map.cluster_of(c));
  }
  const std::vector<double> thresholds = threshold_grid(threshold_step);
  report.curves.reserve(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    report.curves.push_back(pr_curve(class_posteriors, truth, c, thresholds));
  }
  return report;
}

}  // namespace radarseg
