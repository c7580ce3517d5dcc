// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "radarseg/errors.hpp"
#include "radarseg/types.hpp"

namespace radarseg {

/// Semantic traffic classes with stable integer codes.
enum class ClassLabel : int { kClutter = 0, kPedestrian = 1, kCar = 2 };

inline constexpr int kDefaultClassCount = 3;

inline std::string class_name(int code) {
  switch (code) {
    case 0: return "clutter";
    case 1: return "pedestrian";
    case 2: return "car";
    default: return "class_" + std::to_string(code);
  }
}

inline std::string class_name(ClassLabel label) {
  return class_name(static_cast<int>(label));
}

/// Bijective map from mixture component index to class code, both over
/// {0..K-1}.
struct LabelMap {
  std::vector<int> cluster_to_class;

  int k() const { return static_cast<int>(cluster_to_class.size()); }

  int class_of(int cluster) const { return cluster_to_class.at(static_cast<std::size_t>(cluster)); }

  int cluster_of(int class_code) const {
    for (int c = 0; c < k(); ++c) {
      if (cluster_to_class[static_cast<std::size_t>(c)] == class_code) return c;
    }
    throw ConfigError("LabelMap: class code " + std::to_string(class_code) + " not mapped");
  }

  bool is_identity() const {
    for (int c = 0; c < k(); ++c) {
      if (cluster_to_class[static_cast<std::size_t>(c)] != c) return false;
    }
    return true;
  }

  void validate() const {
    std::vector<bool> seen(cluster_to_class.size(), false);
    for (int code : cluster_to_class) {
      if (code < 0 || code >= k() || seen[static_cast<std::size_t>(code)]) {
        throw ConfigError("LabelMap: cluster_to_class is not a bijection over {0..K-1}");
      }
      seen[static_cast<std::size_t>(code)] = true;
    }
  }
};

/// Which centroid coordinate splits pedestrian from car ground truth.
/// Cross-range (x) is the default: the boresight is the y axis, so the two
/// lanes sit left and right of the line of sight along x.
enum class SideAxis { kX, kY, kZ };

inline double side_coordinate(const TrackCentroid& c, SideAxis axis) {
  switch (axis) {
    case SideAxis::kX: return c.px;
    case SideAxis::kY: return c.py;
    case SideAxis::kZ: return c.pz;
  }
  return c.px;
}

/// Ground truth for evaluation scenes: points without a centroid are clutter;
/// tracked points are pedestrian on the positive side of the split axis and
/// car on the other (the boundary itself counts as car).
inline std::vector<ClassLabel> ground_truth_by_side(const Frame& frame,
                                                    SideAxis axis = SideAxis::kX) {
  std::vector<ClassLabel> labels;
  labels.reserve(frame.points.size());
  for (const PointRecord& rec : frame.points) {
    const TrackCentroid* centroid =
        rec.track_id ? frame.find_centroid(*rec.track_id) : nullptr;
    if (centroid == nullptr) {
      labels.push_back(ClassLabel::kClutter);
    } else if (side_coordinate(*centroid, axis) > 0.0) {
      labels.push_back(ClassLabel::kPedestrian);
    } else {
      labels.push_back(ClassLabel::kCar);
    }
  }
  return labels;
}

inline std::vector<int> to_codes(const std::vector<ClassLabel>& labels) {
  std::vector<int> codes;
  codes.reserve(labels.size());
  for (ClassLabel l : labels) codes.push_back(static_cast<int>(l));
  return codes;
}

/// Associates unsupervised cluster indices with truth classes by exhaustive
/// search over all K! assignments, keeping the one that maximizes the number
/// of agreeing points. Ties resolve to the lexicographically smallest
/// permutation. K is capped at 8 (40320 candidates).
inline LabelMap associate_labels(const std::vector<int>& clusters,
                                 const std::vector<int>& truth, int k) {
  if (k < 1) throw ConfigError("associate_labels: K must be >= 1");
  if (k > 8) throw UnsupportedKError("associate_labels: exhaustive search supports K <= 8");
  if (clusters.size() != truth.size()) {
    throw ConfigError("associate_labels: prediction and truth lengths differ");
  }
  // contingency[c][t] = points predicted in cluster c whose truth class is t
  std::vector<std::int64_t> contingency(static_cast<std::size_t>(k) * k, 0);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const int c = clusters[i];
    const int t = truth[i];
    if (c < 0 || c >= k) throw ConfigError("associate_labels: cluster index out of range");
    if (t < 0 || t >= k) throw ConfigError("associate_labels: truth class out of range");
    ++contingency[static_cast<std::size_t>(c) * k + t];
  }

  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  std::int64_t best_trace = -1;
  do {
    std::int64_t trace = 0;
    for (int c = 0; c < k; ++c) {
      trace += contingency[static_cast<std::size_t>(c) * k + perm[static_cast<std::size_t>(c)]];
    }
    // strict > keeps the first (lexicographically smallest) maximizer
    if (trace > best_trace) {
      best_trace = trace;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  LabelMap map{best};
  map.validate();
  return map;
}

}  // namespace radarseg
