// SPDX-License-Identifier: Apache-2.0
//
// JSON bindings for the fit and scene configurations consumed by the CLI.
// Absent fields keep the struct defaults, so config files only need to name
// what they change.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "radarseg/errors.hpp"
#include "radarseg/gmm.hpp"
#include "radarseg/labeling.hpp"
#include "radarseg/simulator.hpp"
#include "radarseg/types.hpp"

namespace radarseg {

namespace detail {

inline Vec3 vec3_from_json(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError("config: \"" + key + "\" must be an array of 3 numbers");
  }
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

inline nlohmann::json vec3_to_json(const Vec3& v) {
  return nlohmann::json::array({v.x(), v.y(), v.z()});
}

inline int class_code_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return j.get<int>();
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "clutter") return 0;
    if (name == "pedestrian") return 1;
    if (name == "car") return 2;
    throw ConfigError("config: unknown class name \"" + name + "\"");
  }
  throw ConfigError("config: \"class\" must be a name or an integer code");
}

}  // namespace detail

inline nlohmann::json fit_config_to_json(const FitConfig& config) {
  return nlohmann::json{
      {"k", config.k},
      {"seed", config.seed},
      {"max_iterations", config.max_iterations},
      {"rel_tolerance", config.rel_tolerance},
      {"epsilon", config.epsilon},
      {"init", config.init == InitStrategy::kKmeansSeeded ? "kmeans" : "random"}};
}

inline FitConfig fit_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("fit config: expected a JSON object");
  FitConfig config;
  config.k = j.value("k", config.k);
  config.seed = j.value("seed", config.seed);
  config.max_iterations = j.value("max_iterations", config.max_iterations);
  config.rel_tolerance = j.value("rel_tolerance", config.rel_tolerance);
  config.epsilon = j.value("epsilon", config.epsilon);
  if (j.contains("init")) {
    const std::string init = j.at("init").get<std::string>();
    if (init == "kmeans") {
      config.init = InitStrategy::kKmeansSeeded;
    } else if (init == "random") {
      config.init = InitStrategy::kRandomResponsibility;
    } else {
      throw ConfigError("fit config: init must be \"kmeans\" or \"random\"");
    }
  }
  return config;
}

inline nlohmann::json object_spec_to_json(const ObjectSpec& obj) {
  return nlohmann::json{{"class", static_cast<int>(obj.class_label)},
                        {"start", detail::vec3_to_json(obj.trajectory.start)},
                        {"velocity", detail::vec3_to_json(obj.trajectory.velocity)},
                        {"turn_after", obj.trajectory.turn_after},
                        {"extent_std", detail::vec3_to_json(obj.extent_std)},
                        {"doppler_std", obj.doppler_std},
                        {"rcs_mean", obj.rcs_mean},
                        {"rcs_std", obj.rcs_std},
                        {"mean_points", obj.mean_points},
                        {"duty_on", obj.duty_on},
                        {"duty_off", obj.duty_off}};
}

inline ObjectSpec object_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("scene config: each object must be a JSON object");
  ObjectSpec obj;
  if (j.contains("class")) {
    obj.class_label = static_cast<ClassLabel>(detail::class_code_from_json(j.at("class")));
  }
  if (j.contains("start")) obj.trajectory.start = detail::vec3_from_json(j.at("start"), "start");
  if (j.contains("velocity")) {
    obj.trajectory.velocity = detail::vec3_from_json(j.at("velocity"), "velocity");
  }
  obj.trajectory.turn_after = j.value("turn_after", obj.trajectory.turn_after);
  if (j.contains("extent_std")) {
    obj.extent_std = detail::vec3_from_json(j.at("extent_std"), "extent_std");
  }
  obj.doppler_std = j.value("doppler_std", obj.doppler_std);
  obj.rcs_mean = j.value("rcs_mean", obj.rcs_mean);
  obj.rcs_std = j.value("rcs_std", obj.rcs_std);
  obj.mean_points = j.value("mean_points", obj.mean_points);
  obj.duty_on = j.value("duty_on", obj.duty_on);
  obj.duty_off = j.value("duty_off", obj.duty_off);
  return obj;
}

inline nlohmann::json scene_config_to_json(const SceneConfig& config) {
  nlohmann::json objects = nlohmann::json::array();
  for (const ObjectSpec& obj : config.objects) objects.push_back(object_spec_to_json(obj));
  return nlohmann::json{
      {"objects", std::move(objects)},
      {"clutter",
       {{"rate", config.clutter.rate},
        {"rcs_mean", config.clutter.rcs_mean},
        {"rcs_std", config.clutter.rcs_std},
        {"doppler_std", config.clutter.doppler_std},
        {"box_min", detail::vec3_to_json(config.clutter.box_min)},
        {"box_max", detail::vec3_to_json(config.clutter.box_max)}}},
      {"frame_count", config.frame_count},
      {"frame_period", config.frame_period},
      {"seed", config.seed},
      {"noise_floor", config.noise_floor},
      {"quantization",
       {{"enabled", config.quantization.enabled},
        {"range_resolution", config.quantization.range_resolution},
        {"doppler_resolution", config.quantization.doppler_resolution},
        {"azimuth_resolution", config.quantization.azimuth_resolution},
        {"elevation_resolution", config.quantization.elevation_resolution}}}};
}

/// Scene config from JSON, starting from `base` so partial files tweak the
/// default scene instead of describing everything from scratch.
inline SceneConfig scene_config_from_json(const nlohmann::json& j, SceneConfig base = {}) {
  if (!j.is_object()) throw ConfigError("scene config: expected a JSON object");
  SceneConfig config = std::move(base);
  if (j.contains("objects")) {
    if (!j.at("objects").is_array()) throw ConfigError("scene config: objects must be an array");
    config.objects.clear();
    for (const nlohmann::json& obj : j.at("objects")) {
      config.objects.push_back(object_spec_from_json(obj));
    }
  }
  if (j.contains("clutter")) {
    const nlohmann::json& c = j.at("clutter");
    if (!c.is_object()) throw ConfigError("scene config: clutter must be an object");
    config.clutter.rate = c.value("rate", config.clutter.rate);
    config.clutter.rcs_mean = c.value("rcs_mean", config.clutter.rcs_mean);
    config.clutter.rcs_std = c.value("rcs_std", config.clutter.rcs_std);
    config.clutter.doppler_std = c.value("doppler_std", config.clutter.doppler_std);
    if (c.contains("box_min")) {
      config.clutter.box_min = detail::vec3_from_json(c.at("box_min"), "box_min");
    }
    if (c.contains("box_max")) {
      config.clutter.box_max = detail::vec3_from_json(c.at("box_max"), "box_max");
    }
  }
  config.frame_count = j.value("frame_count", config.frame_count);
  config.frame_period = j.value("frame_period", config.frame_period);
  config.seed = j.value("seed", config.seed);
  config.noise_floor = j.value("noise_floor", config.noise_floor);
  if (j.contains("quantization")) {
    const nlohmann::json& q = j.at("quantization");
    if (!q.is_object()) throw ConfigError("scene config: quantization must be an object");
    config.quantization.enabled = q.value("enabled", config.quantization.enabled);
    config.quantization.range_resolution =
        q.value("range_resolution", config.quantization.range_resolution);
    config.quantization.doppler_resolution =
        q.value("doppler_resolution", config.quantization.doppler_resolution);
    config.quantization.azimuth_resolution =
        q.value("azimuth_resolution", config.quantization.azimuth_resolution);
    config.quantization.elevation_resolution =
        q.value("elevation_resolution", config.quantization.elevation_resolution);
  }
  return config;
}

}  // namespace radarseg
