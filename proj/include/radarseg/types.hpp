// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "radarseg/errors.hpp"

namespace radarseg {

inline constexpr int kFeatureDim = 5;

using Vec3 = Eigen::Vector3d;
using Vec5 = Eigen::Matrix<double, 5, 1>;

/// One detected reflection, in the sensor's polar frame. Angles are carried
/// in degrees on the wire; trigonometry converts to radians internally.
struct RadarPoint {
  double r = 0.0;         // range, m
  double theta_az = 0.0;  // azimuth, deg, measured from boresight toward +x
  double theta_el = 0.0;  // elevation, deg
  double vd = 0.0;        // Doppler velocity, m/s
  double snr = 0.0;       // dB
  double noise = 0.0;     // CFAR window noise, dB

  void validate() const {
    if (!(r > 0.0)) throw ConfigError("RadarPoint: range must be positive");
    if (!std::isfinite(r) || !std::isfinite(theta_az) || !std::isfinite(theta_el) ||
        !std::isfinite(vd) || !std::isfinite(snr) || !std::isfinite(noise)) {
      throw ConfigError("RadarPoint: all fields must be finite");
    }
    if (theta_az < -90.0 || theta_az > 90.0) {
      throw ConfigError("RadarPoint: azimuth outside [-90, 90] degrees");
    }
    if (theta_el < -90.0 || theta_el > 90.0) {
      throw ConfigError("RadarPoint: elevation outside [-90, 90] degrees");
    }
  }
};

/// Tracked object centroid in Cartesian coordinates. The +y axis is the
/// radar boresight, +x is cross-range, +z is up.
struct TrackCentroid {
  int track_id = 0;
  double px = 0.0, py = 0.0, pz = 0.0;  // m
  double vx = 0.0, vy = 0.0, vz = 0.0;  // m/s

  Vec3 position() const { return {px, py, pz}; }
  Vec3 velocity() const { return {vx, vy, vz}; }

  void validate() const {
    if (track_id < 0) throw ConfigError("TrackCentroid: track_id must be non-negative");
    for (double v : {px, py, pz, vx, vy, vz}) {
      if (!std::isfinite(v)) throw ConfigError("TrackCentroid: all fields must be finite");
    }
  }
};

struct PointRecord {
  RadarPoint point;
  std::optional<int> track_id;  // empty for clutter
};

/// One radar frame: detections plus the tracker's centroids.
struct Frame {
  std::int64_t frame_id = 0;
  std::optional<double> timestamp;  // seconds
  std::vector<TrackCentroid> centroids;
  std::vector<PointRecord> points;

  const TrackCentroid* find_centroid(int track_id) const {
    for (const auto& c : centroids) {
      if (c.track_id == track_id) return &c;
    }
    return nullptr;
  }

  /// Checks structural invariants: valid points/centroids, unique track ids,
  /// every referenced track id resolving within this frame.
  void validate() const {
    if (frame_id < 0) throw ConfigError("Frame: frame_id must be non-negative");
    for (std::size_t i = 0; i < centroids.size(); ++i) {
      centroids[i].validate();
      for (std::size_t j = i + 1; j < centroids.size(); ++j) {
        if (centroids[i].track_id == centroids[j].track_id) {
          throw MalformedFrameError("frame " + std::to_string(frame_id) +
                                    ": duplicate track_id " +
                                    std::to_string(centroids[i].track_id));
        }
      }
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      points[i].point.validate();
      if (points[i].track_id && !find_centroid(*points[i].track_id)) {
        throw MalformedFrameError(
            "frame " + std::to_string(frame_id) + ", point " + std::to_string(i) +
            ": track_id " + std::to_string(*points[i].track_id) +
            " has no centroid in this frame");
      }
    }
  }
};

/// The 5-D per-point sample the mixture model operates on.
struct FeatureVector {
  double dx = 0.0;     // m, cross-range offset from centroid
  double dy = 0.0;     // m, boresight offset
  double dz = 0.0;     // m, vertical offset
  double dd = 0.0;     // m/s, Doppler relative to the centroid's radial motion
  double sigma = 0.0;  // dBsm, radar cross-section proxy

  Vec5 to_vector() const {
    Vec5 v;
    v << dx, dy, dz, dd, sigma;
    return v;
  }

  static FeatureVector from_vector(const Vec5& v) {
    return {v[0], v[1], v[2], v[3], v[4]};
  }
};

}  // namespace radarseg
