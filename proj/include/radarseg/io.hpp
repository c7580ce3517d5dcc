// SPDX-License-Identifier: Apache-2.0
//
// File formats: JSONL frame streams, truth CSVs, model JSON, report CSVs,
// and the run manifest attached to every artifact.
#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "radarseg/errors.hpp"
#include "radarseg/gmm.hpp"
#include "radarseg/labeling.hpp"
#include "radarseg/metrics.hpp"
#include "radarseg/types.hpp"
#include "radarseg/version.hpp"

namespace radarseg {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Digests

/// FNV-1a 64-bit hash of a byte string.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string digest_string(std::string_view bytes) {
  std::ostringstream out;
  out << "fnv1a64:" << std::hex << std::setfill('0') << std::setw(16) << fnv1a64(bytes);
  return out.str();
}

// ---------------------------------------------------------------------------
// Run manifest

/// Everything needed to reproduce an artifact: the producing command, its
/// full parameter snapshot (seeds included), and digests of its inputs.
struct RunManifest {
  std::string command;
  json config = json::object();
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, digest)
  std::string tool = kToolName;
  std::string tool_version = kToolVersion;
  int format_version = kFormatVersion;

  json to_json() const {
    json inputs_json = json::array();
    for (const auto& [path, digest] : inputs) {
      inputs_json.push_back({{"path", path}, {"digest", digest}});
    }
    return json{{"tool", tool},
                {"tool_version", tool_version},
                {"format_version", format_version},
                {"command", command},
                {"config", config},
                {"inputs", inputs_json}};
  }

  static RunManifest from_json(const json& j) {
    RunManifest m;
    m.tool = j.value("tool", std::string{});
    m.tool_version = j.value("tool_version", std::string{});
    m.format_version = j.value("format_version", 0);
    m.command = j.value("command", std::string{});
    m.config = j.value("config", json::object());
    if (j.contains("inputs")) {
      for (const json& entry : j.at("inputs")) {
        m.inputs.emplace_back(entry.value("path", std::string{}),
                              entry.value("digest", std::string{}));
      }
    }
    return m;
  }
};

// ---------------------------------------------------------------------------
// Frame streams (JSONL)

/// An ordered frame sequence plus optional per-point truth class codes and
/// provenance.
struct FrameSet {
  std::vector<Frame> frames;
  std::optional<std::vector<std::vector<int>>> truth;  // parallel to frames[i].points
  std::string source;

  std::size_t total_points() const {
    std::size_t n = 0;
    for (const Frame& f : frames) n += f.points.size();
    return n;
  }

  void validate() const {
    for (const Frame& f : frames) f.validate();
    if (truth) {
      if (truth->size() != frames.size()) {
        throw ConfigError("FrameSet: truth does not cover every frame");
      }
      for (std::size_t i = 0; i < frames.size(); ++i) {
        if ((*truth)[i].size() != frames[i].points.size()) {
          throw ConfigError("FrameSet: truth does not cover frame " +
                            std::to_string(frames[i].frame_id) + " exactly");
        }
      }
    }
  }
};

namespace detail {

inline double require_number(const json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key)) throw ParseError("missing required field", line, key);
  const json& v = obj.at(key);
  if (!v.is_number()) throw ParseError("expected a number", line, key);
  return v.get<double>();
}

inline std::int64_t require_int(const json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key)) throw ParseError("missing required field", line, key);
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ParseError("expected an integer", line, key);
  return v.get<std::int64_t>();
}

inline const json& require_array(const json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key)) throw ParseError("missing required field", line, key);
  const json& v = obj.at(key);
  if (!v.is_array()) throw ParseError("expected an array", line, key);
  return v;
}

}  // namespace detail

/// Parse one JSONL line into a frame. The line number only feeds error
/// messages.
inline Frame parse_frame_line(const std::string& line, std::size_t line_no) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  if (!obj.is_object()) throw ParseError("expected a JSON object", line_no);

  Frame frame;
  frame.frame_id = detail::require_int(obj, "frame_id", line_no);
  if (obj.contains("timestamp") && !obj.at("timestamp").is_null()) {
    if (!obj.at("timestamp").is_number()) {
      throw ParseError("expected a number", line_no, "timestamp");
    }
    frame.timestamp = obj.at("timestamp").get<double>();
  }

  for (const json& c : detail::require_array(obj, "centroids", line_no)) {
    if (!c.is_object()) throw ParseError("expected an object", line_no, "centroids");
    TrackCentroid centroid;
    centroid.track_id = static_cast<int>(detail::require_int(c, "track_id", line_no));
    centroid.px = detail::require_number(c, "pX", line_no);
    centroid.py = detail::require_number(c, "pY", line_no);
    centroid.pz = detail::require_number(c, "pZ", line_no);
    centroid.vx = detail::require_number(c, "vX", line_no);
    centroid.vy = detail::require_number(c, "vY", line_no);
    centroid.vz = detail::require_number(c, "vZ", line_no);
    frame.centroids.push_back(centroid);
  }

  for (const json& p : detail::require_array(obj, "points", line_no)) {
    if (!p.is_object()) throw ParseError("expected an object", line_no, "points");
    PointRecord record;
    record.point.r = detail::require_number(p, "r", line_no);
    record.point.theta_az = detail::require_number(p, "theta_az", line_no);
    record.point.theta_el = detail::require_number(p, "theta_el", line_no);
    record.point.vd = detail::require_number(p, "vD", line_no);
    record.point.snr = detail::require_number(p, "snr", line_no);
    record.point.noise = detail::require_number(p, "noise", line_no);
    if (p.contains("track_id") && !p.at("track_id").is_null()) {
      if (!p.at("track_id").is_number_integer()) {
        throw ParseError("expected an integer", line_no, "track_id");
      }
      record.track_id = p.at("track_id").get<int>();
    }
    frame.points.push_back(record);
  }

  try {
    frame.validate();
  } catch (const Error& e) {
    throw ParseError(e.what(), line_no, "track_id");
  }
  return frame;
}

/// Read a JSONL frame stream. Blank lines are skipped; anything else must be
/// a valid frame object. Errors name the 1-based line and the field.
inline FrameSet read_frames(std::istream& in, const std::string& source = "<stream>") {
  FrameSet set;
  set.source = source;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    set.frames.push_back(parse_frame_line(line, line_no));
  }
  return set;
}

inline json frame_to_json(const Frame& frame) {
  json centroids = json::array();
  for (const TrackCentroid& c : frame.centroids) {
    centroids.push_back({{"track_id", c.track_id},
                         {"pX", c.px},
                         {"pY", c.py},
                         {"pZ", c.pz},
                         {"vX", c.vx},
                         {"vY", c.vy},
                         {"vZ", c.vz}});
  }
  json points = json::array();
  for (const PointRecord& p : frame.points) {
    json point{{"r", p.point.r},
               {"theta_az", p.point.theta_az},
               {"theta_el", p.point.theta_el},
               {"vD", p.point.vd},
               {"snr", p.point.snr},
               {"noise", p.point.noise}};
    if (p.track_id) point["track_id"] = *p.track_id;
    points.push_back(std::move(point));
  }
  json obj{{"frame_id", frame.frame_id}, {"centroids", centroids}, {"points", points}};
  if (frame.timestamp) obj["timestamp"] = *frame.timestamp;
  return obj;
}

inline void write_frames(std::ostream& out, const FrameSet& set) {
  for (const Frame& frame : set.frames) {
    out << frame_to_json(frame).dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Truth CSV (frame_id, point_index, class_code)

inline void write_truth_csv(std::ostream& out, const FrameSet& set) {
  if (!set.truth) throw ConfigError("write_truth_csv: frame set carries no truth");
  out << "frame_id,point_index,class_code\n";
  for (std::size_t i = 0; i < set.frames.size(); ++i) {
    for (std::size_t j = 0; j < (*set.truth)[i].size(); ++j) {
      out << set.frames[i].frame_id << ',' << j << ',' << (*set.truth)[i][j] << '\n';
    }
  }
}

/// Attach truth labels from CSV rows to a frame set. Every point must be
/// covered exactly once.
inline void read_truth_csv(std::istream& in, FrameSet& set) {
  std::vector<std::vector<int>> truth(set.frames.size());
  std::vector<std::vector<bool>> seen(set.frames.size());
  std::unordered_map<std::int64_t, std::size_t> frame_index;
  for (std::size_t i = 0; i < set.frames.size(); ++i) {
    truth[i].assign(set.frames[i].points.size(), -1);
    seen[i].assign(set.frames[i].points.size(), false);
    frame_index[set.frames[i].frame_id] = i;
  }

  std::string line;
  std::size_t line_no = 0;
  std::size_t covered = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("frame_id", 0) == 0) continue;  // header

    std::istringstream row(line);
    std::int64_t frame_id = 0;
    std::size_t point_index = 0;
    int class_code = 0;
    char c1 = 0, c2 = 0;
    if (!(row >> frame_id >> c1 >> point_index >> c2 >> class_code) || c1 != ',' || c2 != ',') {
      throw ParseError("expected frame_id,point_index,class_code", line_no);
    }
    auto it = frame_index.find(frame_id);
    if (it == frame_index.end()) {
      throw ParseError("unknown frame_id " + std::to_string(frame_id), line_no, "frame_id");
    }
    const std::size_t fi = it->second;
    if (point_index >= truth[fi].size()) {
      throw ParseError("point_index out of range", line_no, "point_index");
    }
    if (seen[fi][point_index]) {
      throw ParseError("duplicate truth row for the same point", line_no, "point_index");
    }
    if (class_code < 0) throw ParseError("class_code must be >= 0", line_no, "class_code");
    seen[fi][point_index] = true;
    truth[fi][point_index] = class_code;
    ++covered;
  }

  if (covered != set.total_points()) {
    throw ConfigError("truth covers " + std::to_string(covered) + " of " +
                      std::to_string(set.total_points()) + " points");
  }
  set.truth = std::move(truth);
}

// ---------------------------------------------------------------------------
// Model JSON

inline json model_to_json(const GmmModel& model, const RunManifest& manifest) {
  model.params.validate();
  const int k = model.params.k();
  const int d = model.params.d();

  json weights = json::array();
  for (int i = 0; i < k; ++i) weights.push_back(model.params.weights[i]);

  json means = json::array();
  for (int i = 0; i < k; ++i) {
    json row = json::array();
    for (int j = 0; j < d; ++j) row.push_back(model.params.means(i, j));
    means.push_back(std::move(row));
  }

  json covariances = json::array();
  for (int i = 0; i < k; ++i) {
    const Eigen::MatrixXd& cov = model.params.covariances[static_cast<std::size_t>(i)];
    json mat = json::array();
    for (int r = 0; r < d; ++r) {
      json row = json::array();
      for (int c = 0; c < d; ++c) row.push_back(cov(r, c));
      mat.push_back(std::move(row));
    }
    covariances.push_back(std::move(mat));
  }

  json obj{{"k", k},
           {"d", d},
           {"weights", std::move(weights)},
           {"means", std::move(means)},
           {"covariances", std::move(covariances)},
           {"manifest", manifest.to_json()}};
  if (model.label_map) {
    json lm = json::object();
    for (int c = 0; c < model.label_map->k(); ++c) {
      lm[std::to_string(c)] = model.label_map->class_of(c);
    }
    obj["label_map"] = std::move(lm);
  }
  return obj;
}

inline std::pair<GmmModel, RunManifest> model_from_json(const json& obj) {
  try {
    if (!obj.is_object()) throw ModelIoError("model file: expected a JSON object");
    for (const char* key : {"k", "d", "weights", "means", "covariances", "manifest"}) {
      if (!obj.contains(key)) {
        throw ModelIoError(std::string("model file: missing field \"") + key + "\"");
      }
    }
    RunManifest manifest = RunManifest::from_json(obj.at("manifest"));
    if (manifest.format_version != kFormatVersion) {
      throw ModelIoError("model file: format version " +
                         std::to_string(manifest.format_version) + " not supported (expected " +
                         std::to_string(kFormatVersion) + ")");
    }

    const int k = obj.at("k").get<int>();
    const int d = obj.at("d").get<int>();
    if (k < 1 || d < 1) throw ModelIoError("model file: k and d must be >= 1");

    GmmModel model;
    const json& weights = obj.at("weights");
    const json& means = obj.at("means");
    const json& covariances = obj.at("covariances");
    if (static_cast<int>(weights.size()) != k || static_cast<int>(means.size()) != k ||
        static_cast<int>(covariances.size()) != k) {
      throw ModelIoError("model file: parameter arrays disagree with k");
    }
    model.params.weights.resize(k);
    model.params.means.resize(k, d);
    model.params.covariances.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      model.params.weights[i] = weights.at(i).get<double>();
      if (static_cast<int>(means.at(i).size()) != d) {
        throw ModelIoError("model file: mean row has wrong length");
      }
      for (int j = 0; j < d; ++j) model.params.means(i, j) = means.at(i).at(j).get<double>();
      const json& mat = covariances.at(i);
      if (static_cast<int>(mat.size()) != d) {
        throw ModelIoError("model file: covariance has wrong shape");
      }
      Eigen::MatrixXd cov(d, d);
      for (int r = 0; r < d; ++r) {
        if (static_cast<int>(mat.at(r).size()) != d) {
          throw ModelIoError("model file: covariance has wrong shape");
        }
        for (int c = 0; c < d; ++c) cov(r, c) = mat.at(r).at(c).get<double>();
      }
      model.params.covariances[static_cast<std::size_t>(i)] = std::move(cov);
    }

    if (obj.contains("label_map") && !obj.at("label_map").is_null()) {
      LabelMap lm;
      lm.cluster_to_class.assign(static_cast<std::size_t>(k), -1);
      for (const auto& [key, value] : obj.at("label_map").items()) {
        int cluster = -1;
        try {
          cluster = std::stoi(key);
        } catch (const std::exception&) {
          throw ModelIoError("model file: label_map key \"" + key + "\" is not a cluster index");
        }
        if (cluster < 0 || cluster >= k) {
          throw ModelIoError("model file: label_map cluster " + key + " out of range");
        }
        lm.cluster_to_class[static_cast<std::size_t>(cluster)] = value.get<int>();
      }
      lm.validate();
      model.label_map = std::move(lm);
    }

    model.params.validate();
    return {std::move(model), std::move(manifest)};
  } catch (const ModelIoError&) {
    throw;
  } catch (const Error& e) {
    throw ModelIoError(std::string("model file: ") + e.what());
  } catch (const json::exception& e) {
    throw ModelIoError(std::string("model file: ") + e.what());
  }
}

inline std::string model_to_string(const GmmModel& model, const RunManifest& manifest) {
  return model_to_json(model, manifest).dump(2) + "\n";
}

inline void save_model(const GmmModel& model, const RunManifest& manifest,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelIoError("cannot open \"" + path + "\" for writing");
  out << model_to_string(model, manifest);
  if (!out) throw ModelIoError("failed writing \"" + path + "\"");
}

inline std::pair<GmmModel, RunManifest> load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelIoError("cannot open \"" + path + "\" for reading");
  json obj;
  try {
    obj = json::parse(in);
  } catch (const json::exception& e) {
    throw ModelIoError("model file \"" + path + "\": " + e.what());
  }
  return model_from_json(obj);
}

// ---------------------------------------------------------------------------
// Report CSVs (4 decimal places)

namespace detail {

inline std::string fixed4(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

}  // namespace detail

/// One row per class, ordered by class code.
inline void write_metrics_csv(std::ostream& out, const std::vector<ClassMetrics>& metrics) {
  out << "class_code,class_name,precision,recall,f1,iou,support\n";
  for (std::size_t c = 0; c < metrics.size(); ++c) {
    const ClassMetrics& m = metrics[c];
    out << c << ',' << class_name(static_cast<int>(c)) << ',' << detail::fixed4(m.precision)
        << ',' << detail::fixed4(m.recall) << ',' << detail::fixed4(m.f1) << ','
        << detail::fixed4(m.iou) << ',' << m.support << '\n';
  }
}

/// Rows are truth classes, columns predicted classes.
inline void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm) {
  out << "truth_class";
  for (int c = 0; c < cm.k; ++c) out << ",pred_" << class_name(c);
  out << '\n';
  for (int t = 0; t < cm.k; ++t) {
    out << class_name(t);
    for (int c = 0; c < cm.k; ++c) out << ',' << cm.at(t, c);
    out << '\n';
  }
}

inline void write_pr_csv(std::ostream& out, const PrCurve& curve) {
  out << "threshold,precision,recall\n";
  for (const PrPoint& p : curve.points) {
    out << detail::fixed4(p.threshold) << ',' << detail::fixed4(p.precision) << ','
        << detail::fixed4(p.recall) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Small file helpers

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open \"" + path + "\" for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open \"" + path + "\" for writing");
  out << content;
  if (!out) throw ConfigError("failed writing \"" + path + "\"");
}

/// Sidecar manifest next to a report file.
inline void write_manifest_sidecar(const std::string& path, const RunManifest& manifest) {
  write_file(path + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

}  // namespace radarseg
