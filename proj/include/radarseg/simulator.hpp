// SPDX-License-Identifier: Apache-2.0
//
// Deterministic scene generator. Objects follow parametric paths through the
// detection area and shed Gaussian point clouds around their centroids;
// clutter fills the area with centroid-free detections. Points are written in
// the polar wire format by inverting the feature equations, so with
// quantization disabled the feature extractor recovers the drawn values
// exactly.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "radarseg/errors.hpp"
#include "radarseg/features.hpp"
#include "radarseg/labeling.hpp"
#include "radarseg/rng.hpp"
#include "radarseg/types.hpp"

namespace radarseg {

inline constexpr double kMaxRangeM = 15.0;       // detection area: range limit
inline constexpr double kMaxCrossRangeM = 9.0;   // detection area: |x| limit

/// Piecewise-linear path. With turn_after > 0 the motion reverses every
/// turn_after seconds, ping-ponging between the start and the far end; with
/// turn_after <= 0 it is a plain constant-velocity line.
struct Trajectory {
  Vec3 start = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double turn_after = 0.0;  // seconds per leg; <= 0 means never turn

  Vec3 position(double t) const {
    if (turn_after <= 0.0) return start + velocity * t;
    const double u = std::fmod(t, 2.0 * turn_after);
    return start + velocity * (u < turn_after ? u : 2.0 * turn_after - u);
  }

  Vec3 velocity_at(double t) const {
    if (turn_after <= 0.0) return velocity;
    const double u = std::fmod(t, 2.0 * turn_after);
    return u < turn_after ? velocity : Vec3(-velocity);
  }

  /// Farthest point reached within [0, duration].
  Vec3 far_end(double duration) const {
    const double leg = turn_after > 0.0 ? std::min(turn_after, duration) : duration;
    return start + velocity * leg;
  }
};

namespace detail {

inline bool inside_area(const Vec3& p) {
  return p.norm() <= kMaxRangeM && std::abs(p.x()) <= kMaxCrossRangeM;
}

}  // namespace detail

/// One simulated object class instance: where it moves and what its point
/// cloud looks like statistically.
struct ObjectSpec {
  ClassLabel class_label = ClassLabel::kPedestrian;
  Trajectory trajectory;
  Vec3 extent_std = Vec3(0.3, 0.3, 0.3);  // m, per-axis spatial offset std
  double doppler_std = 0.3;               // m/s, Doppler offset std
  double rcs_mean = 50.0;                 // dB, reflection strength proxy
  double rcs_std = 2.0;
  double mean_points = 10.0;              // Poisson mean points per frame
  double duty_on = 0.0;                   // seconds present per cycle; <= 0 means always
  double duty_off = 0.0;                  // seconds absent per cycle

  bool present_at(double t) const {
    if (duty_on <= 0.0 || duty_off <= 0.0) return true;
    return std::fmod(t, duty_on + duty_off) < duty_on;
  }

  void validate(double duration) const {
    if (!(extent_std.x() > 0.0 && extent_std.y() > 0.0 && extent_std.z() > 0.0)) {
      throw ConfigError("ObjectSpec: extent stds must be positive");
    }
    if (!(doppler_std > 0.0)) throw ConfigError("ObjectSpec: doppler_std must be positive");
    if (!(rcs_std > 0.0)) throw ConfigError("ObjectSpec: rcs_std must be positive");
    if (!(mean_points >= 0.0)) throw ConfigError("ObjectSpec: mean_points must be >= 0");
    if (duty_on < 0.0 || duty_off < 0.0) throw ConfigError("ObjectSpec: duty times must be >= 0");
    // Both extremes of a linear leg inside the (convex) area keep the whole
    // leg inside it.
    if (!detail::inside_area(trajectory.start) ||
        !detail::inside_area(trajectory.far_end(duration))) {
      throw ConfigError("ObjectSpec: trajectory leaves the detection area (range <= " +
                        std::to_string(kMaxRangeM) + " m, |cross-range| <= " +
                        std::to_string(kMaxCrossRangeM) + " m)");
    }
  }
};

/// Centroid-free background detections, uniform over a box in front of the
/// sensor with near-zero Doppler.
struct ClutterSpec {
  double rate = 5.0;  // Poisson mean points per frame
  double rcs_mean = 40.0;
  double rcs_std = 4.0;
  double doppler_std = 0.05;
  Vec3 box_min = Vec3(-9.0, 0.5, 0.0);
  Vec3 box_max = Vec3(9.0, 11.5, 3.0);

  void validate() const {
    if (!(rate >= 0.0)) throw ConfigError("ClutterSpec: rate must be >= 0");
    if (!(rcs_std > 0.0)) throw ConfigError("ClutterSpec: rcs_std must be positive");
    if (!(doppler_std >= 0.0)) throw ConfigError("ClutterSpec: doppler_std must be >= 0");
    for (int i = 0; i < 3; ++i) {
      if (!(box_min[i] <= box_max[i])) throw ConfigError("ClutterSpec: box_min exceeds box_max");
    }
    if (box_min.y() < 0.0) throw ConfigError("ClutterSpec: box must lie in front of the sensor");
  }
};

struct QuantizationConfig {
  bool enabled = false;
  double range_resolution = 0.09;      // m
  double doppler_resolution = 0.8;     // m/s
  double azimuth_resolution = 15.0;    // deg
  double elevation_resolution = 28.0;  // deg

  void validate() const {
    if (!enabled) return;
    if (!(range_resolution > 0.0 && doppler_resolution > 0.0 && azimuth_resolution > 0.0 &&
          elevation_resolution > 0.0)) {
      throw ConfigError("QuantizationConfig: resolutions must be positive when enabled");
    }
  }
};

struct SceneConfig {
  std::vector<ObjectSpec> objects;
  ClutterSpec clutter;
  int frame_count = 1;
  double frame_period = 0.1;  // seconds
  std::uint64_t seed = 0;
  QuantizationConfig quantization;
  double noise_floor = 10.0;  // dB; the fixed "noise" share of the sigma proxy

  double duration() const { return (frame_count - 1) * frame_period; }

  void validate() const {
    if (frame_count < 1) throw ConfigError("SceneConfig: frame_count must be >= 1");
    if (!(frame_period > 0.0)) throw ConfigError("SceneConfig: frame_period must be positive");
    if (!std::isfinite(noise_floor)) throw ConfigError("SceneConfig: noise_floor must be finite");
    quantization.validate();
    clutter.validate();
    for (const ObjectSpec& obj : objects) obj.validate(duration());
  }

  /// Two-object traffic scene (pedestrian on the positive cross-range side,
  /// car on the negative side) over background clutter, sized to the default
  /// training run. Pair with frame_count 1200 and a fresh seed for a test
  /// split.
  static SceneConfig traffic_default() {
    SceneConfig config;

    ObjectSpec pedestrian;
    pedestrian.class_label = ClassLabel::kPedestrian;
    pedestrian.trajectory = {Vec3(4.0, 3.0, 0.9), Vec3(0.0, 1.2, 0.0), 6.0};
    pedestrian.extent_std = Vec3(0.25, 0.25, 0.45);
    pedestrian.doppler_std = 0.45;
    pedestrian.rcs_mean = 52.0;
    pedestrian.rcs_std = 2.5;
    pedestrian.mean_points = 12.0;

    ObjectSpec car;
    car.class_label = ClassLabel::kCar;
    car.trajectory = {Vec3(-4.0, 2.0, 0.6), Vec3(0.0, 5.0, 0.0), 2.0};
    car.extent_std = Vec3(0.9, 1.8, 0.5);
    car.doppler_std = 0.12;
    car.rcs_mean = 65.0;
    car.rcs_std = 2.5;
    car.mean_points = 18.0;
    car.duty_on = 6.0;  // the car passes through less often than the pedestrian walks
    car.duty_off = 4.0;

    config.objects = {pedestrian, car};
    config.clutter.rate = 8.0;
    config.clutter.rcs_mean = 42.0;
    config.clutter.rcs_std = 4.0;
    config.clutter.doppler_std = 0.05;
    config.frame_count = 8000;
    config.frame_period = 0.1;
    config.seed = 1;
    config.quantization.enabled = true;
    return config;
  }
};

/// Nearest-multiple rounding of the four measured channels; snr and noise
/// pass through. A range that would round to zero keeps the first bin so the
/// point stays a valid measurement.
inline RadarPoint quantize_measurement(const RadarPoint& point, const QuantizationConfig& q) {
  if (!q.enabled) return point;
  q.validate();
  auto snap = [](double value, double resolution) {
    return resolution * std::round(value / resolution);
  };
  RadarPoint out = point;
  out.r = std::max(snap(point.r, q.range_resolution), q.range_resolution);
  out.vd = snap(point.vd, q.doppler_resolution);
  out.theta_az = std::clamp(snap(point.theta_az, q.azimuth_resolution), -90.0, 90.0);
  out.theta_el = std::clamp(snap(point.theta_el, q.elevation_resolution), -90.0, 90.0);
  return out;
}

/// i.i.d. multivariate normal feature draws via the Cholesky factor.
inline std::vector<FeatureVector> sample_features(const Vec5& mean, const Eigen::MatrixXd& cov,
                                                  int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_features: n must be >= 1");
  if (cov.rows() != kFeatureDim || cov.cols() != kFeatureDim) {
    throw ConfigError("sample_features: covariance must be 5x5");
  }
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ConfigError("sample_features: covariance must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw SingularCovarianceError("sample_features: covariance is not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();

  Rng rng(seed);
  std::vector<FeatureVector> out;
  out.reserve(static_cast<std::size_t>(n));
  Eigen::VectorXd z(kFeatureDim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < kFeatureDim; ++j) z[j] = rng.normal();
    out.push_back(FeatureVector::from_vector(mean + l * z));
  }
  return out;
}

namespace detail {

/// Cartesian position to the polar wire channels. False when the position
/// falls outside the forward hemisphere the angle bounds can express.
inline bool to_polar(const Vec3& q, double& r, double& az_deg, double& el_deg) {
  r = q.norm();
  if (!(r > 0.0)) return false;
  el_deg = rad2deg(std::asin(std::clamp(q.z() / r, -1.0, 1.0)));
  az_deg = rad2deg(std::atan2(q.x(), q.y()));
  return az_deg >= -90.0 && az_deg <= 90.0 && el_deg >= -90.0 && el_deg <= 90.0;
}

inline constexpr int kMaxDrawAttempts = 1000;

}  // namespace detail

struct SimulatedScene {
  std::vector<Frame> frames;
  std::vector<std::vector<ClassLabel>> truth;  // parallel to frames[i].points
};

/// Generate the configured scene. Deterministic: one RNG stream, consumed in
/// frame order, objects before clutter within a frame.
inline SimulatedScene simulate_scene(const SceneConfig& config) {
  config.validate();
  Rng rng(config.seed);
  SimulatedScene scene;
  scene.frames.reserve(static_cast<std::size_t>(config.frame_count));
  scene.truth.reserve(static_cast<std::size_t>(config.frame_count));

  for (int f = 0; f < config.frame_count; ++f) {
    const double t = f * config.frame_period;
    Frame frame;
    frame.frame_id = f;
    frame.timestamp = t;
    std::vector<ClassLabel> labels;

    for (std::size_t oi = 0; oi < config.objects.size(); ++oi) {
      const ObjectSpec& obj = config.objects[oi];
      if (!obj.present_at(t)) continue;
      const Vec3 p = obj.trajectory.position(t);
      const Vec3 v = obj.trajectory.velocity_at(t);
      const int track_id = static_cast<int>(oi);
      frame.centroids.push_back(
          {track_id, p.x(), p.y(), p.z(), v.x(), v.y(), v.z()});

      const int count = rng.poisson(obj.mean_points);
      for (int i = 0; i < count; ++i) {
        Vec3 q;
        double r = 0.0, az = 0.0, el = 0.0;
        int attempts = 0;
        do {
          if (++attempts > detail::kMaxDrawAttempts) {
            throw ConfigError("simulate_scene: object " + std::to_string(oi) +
                              " keeps producing points outside the sensor's field of view");
          }
          q = p + Vec3(rng.normal(0.0, obj.extent_std.x()),
                       rng.normal(0.0, obj.extent_std.y()),
                       rng.normal(0.0, obj.extent_std.z()));
        } while (!detail::to_polar(q, r, az, el));

        const double dd = rng.normal(0.0, obj.doppler_std);
        const double sigma = rng.normal(obj.rcs_mean, obj.rcs_std);

        RadarPoint point;
        point.r = r;
        point.theta_az = az;
        point.theta_el = el;
        point.vd = dd + (q / r).dot(v);
        point.noise = config.noise_floor;
        point.snr = sigma - 40.0 * std::log10(r) - config.noise_floor;
        point = quantize_measurement(point, config.quantization);

        frame.points.push_back({point, track_id});
        labels.push_back(obj.class_label);
      }
    }

    const int clutter_count = rng.poisson(config.clutter.rate);
    for (int i = 0; i < clutter_count; ++i) {
      Vec3 q;
      double r = 0.0, az = 0.0, el = 0.0;
      int attempts = 0;
      do {
        if (++attempts > detail::kMaxDrawAttempts) {
          throw ConfigError(
              "simulate_scene: clutter box keeps producing points outside the "
              "sensor's field of view");
        }
        for (int a = 0; a < 3; ++a) {
          q[a] = rng.uniform(config.clutter.box_min[a], config.clutter.box_max[a]);
        }
      } while (!detail::to_polar(q, r, az, el));

      const double sigma = rng.normal(config.clutter.rcs_mean, config.clutter.rcs_std);
      RadarPoint point;
      point.r = r;
      point.theta_az = az;
      point.theta_el = el;
      point.vd = config.clutter.doppler_std > 0.0
                     ? rng.normal(0.0, config.clutter.doppler_std)
                     : 0.0;
      point.noise = config.noise_floor;
      point.snr = sigma - 40.0 * std::log10(r) - config.noise_floor;
      point = quantize_measurement(point, config.quantization);

      frame.points.push_back({point, std::nullopt});
      labels.push_back(ClassLabel::kClutter);
    }

    frame.validate();
    scene.frames.push_back(std::move(frame));
    scene.truth.push_back(std::move(labels));
  }
  return scene;
}

}  // namespace radarseg
