// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "radarseg/types.hpp"

namespace radarseg {

inline constexpr double deg2rad(double deg) { return deg * M_PI / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / M_PI; }

/// Unit line-of-sight direction for a polar measurement. Doubles as the
/// Cartesian position when scaled by the range.
inline Vec3 direction(const RadarPoint& p) {
  const double az = deg2rad(p.theta_az);
  const double el = deg2rad(p.theta_el);
  const double cos_el = std::cos(el);
  return {cos_el * std::sin(az), cos_el * std::cos(az), std::sin(el)};
}

/// Polar-to-Cartesian conversion: x = r cos(el) sin(az), y = r cos(el) cos(az),
/// z = r sin(el). The +y axis is boresight.
inline Vec3 to_cartesian(const RadarPoint& p) { return p.r * direction(p); }

/// Computes the 5-D feature vector for one point. Without a centroid the
/// point acts as its own zero-velocity centroid: spatial deltas are zero and
/// the relative Doppler is the raw measurement.
inline FeatureVector extract_features(const RadarPoint& point,
                                      const TrackCentroid* centroid) {
  FeatureVector f;
  f.sigma = 10.0 * std::log10(point.r * point.r * point.r * point.r) +
            point.snr + point.noise;
  if (centroid == nullptr) {
    f.dd = point.vd;
    return f;
  }
  const Vec3 dir = direction(point);
  const Vec3 pos = point.r * dir;
  f.dx = pos.x() - centroid->px;
  f.dy = pos.y() - centroid->py;
  f.dz = pos.z() - centroid->pz;
  f.dd = point.vd - dir.dot(centroid->velocity());
  return f;
}

inline FeatureVector extract_features(const RadarPoint& point,
                                      const std::optional<TrackCentroid>& centroid) {
  return extract_features(point, centroid ? &*centroid : nullptr);
}

struct FrameFeature {
  FeatureVector features;
  std::size_t point_index = 0;
  std::optional<int> track_id;
};

/// Per-point features for a whole frame, order preserved. A point whose
/// track_id does not resolve to a centroid raises MalformedFrameError.
inline std::vector<FrameFeature> extract_frame_features(const Frame& frame) {
  std::vector<FrameFeature> out;
  out.reserve(frame.points.size());
  for (std::size_t i = 0; i < frame.points.size(); ++i) {
    const PointRecord& rec = frame.points[i];
    const TrackCentroid* centroid = nullptr;
    if (rec.track_id) {
      centroid = frame.find_centroid(*rec.track_id);
      if (centroid == nullptr) {
        throw MalformedFrameError(
            "frame " + std::to_string(frame.frame_id) + ", point " +
            std::to_string(i) + ": track_id " + std::to_string(*rec.track_id) +
            " has no centroid in this frame");
      }
    }
    out.push_back({extract_features(rec.point, centroid), i, rec.track_id});
  }
  return out;
}

/// Stacks the features of many frames into one N x 5 matrix, frames in order,
/// points in frame order.
inline Eigen::MatrixXd pool_features(const std::vector<Frame>& frames) {
  std::size_t total = 0;
  for (const Frame& f : frames) total += f.points.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(total), kFeatureDim);
  Eigen::Index row = 0;
  for (const Frame& f : frames) {
    for (const FrameFeature& ff : extract_frame_features(f)) {
      x.row(row++) = ff.features.to_vector().transpose();
    }
  }
  return x;
}

}  // namespace radarseg
