// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: simulate labeled scenes, fit the mixture model,
// predict per-point labels, and evaluate against truth.
//
// Exit codes: 0 success, 1 internal/numeric failure, 2 usage or input error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "radarseg/radarseg.hpp"

namespace {

namespace fs = std::filesystem;
using radarseg::json;

struct NamedInput {
  std::string name;   // display path
  std::string bytes;  // full content
};

/// Read a file or, for "-", standard input. The raw bytes feed both parsing
/// and the manifest digest.
NamedInput slurp_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return {"<stdin>", buffer.str()};
  }
  return {path, radarseg::read_file(path)};
}

radarseg::FrameSet read_frame_input(const NamedInput& input) {
  std::istringstream stream(input.bytes);
  return radarseg::read_frames(stream, input.name);
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  radarseg::write_file(path, content);
}

json parse_json_file(const NamedInput& input) {
  try {
    return json::parse(input.bytes);
  } catch (const json::exception& e) {
    throw radarseg::ConfigError("config file " + input.name + ": " + e.what());
  }
}

std::string derive_truth_path(const std::string& output) {
  const fs::path p(output);
  fs::path derived = p;
  derived.replace_extension();
  derived += ".truth.csv";
  return derived.string();
}

void ensure_parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string config_path;
  std::string output = "-";
  std::string truth_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> frames;
  bool quantize_on = false;
  bool quantize_off = false;
};

int cmd_simulate(const SimulateOptions& opt) {
  radarseg::SceneConfig config = radarseg::SceneConfig::traffic_default();
  radarseg::RunManifest manifest;
  manifest.command = "simulate";
  if (!opt.config_path.empty()) {
    const NamedInput input = slurp_input(opt.config_path);
    config = radarseg::scene_config_from_json(parse_json_file(input), std::move(config));
    manifest.inputs.emplace_back(input.name, radarseg::digest_string(input.bytes));
  }
  if (opt.seed) config.seed = *opt.seed;
  if (opt.frames) config.frame_count = *opt.frames;
  if (opt.quantize_on && opt.quantize_off) {
    throw radarseg::ConfigError("--quantize and --no-quantize are mutually exclusive");
  }
  if (opt.quantize_on) config.quantization.enabled = true;
  if (opt.quantize_off) config.quantization.enabled = false;
  manifest.config = radarseg::scene_config_to_json(config);

  const radarseg::SimulatedScene scene = radarseg::simulate_scene(config);

  radarseg::FrameSet set;
  set.frames = scene.frames;
  std::vector<std::vector<int>> truth;
  truth.reserve(scene.truth.size());
  for (const auto& labels : scene.truth) truth.push_back(radarseg::to_codes(labels));
  set.truth = std::move(truth);
  set.source = "simulated";

  std::ostringstream frames_out;
  radarseg::write_frames(frames_out, set);
  if (opt.output != "-") ensure_parent_dir(opt.output);
  write_output(opt.output, frames_out.str());
  if (opt.output != "-") radarseg::write_manifest_sidecar(opt.output, manifest);

  std::string truth_path = opt.truth_path;
  if (truth_path.empty() && opt.output != "-") truth_path = derive_truth_path(opt.output);
  if (!truth_path.empty()) {
    std::ostringstream truth_out;
    radarseg::write_truth_csv(truth_out, set);
    ensure_parent_dir(truth_path);
    write_output(truth_path, truth_out.str());
    if (truth_path != "-") radarseg::write_manifest_sidecar(truth_path, manifest);
  }

  std::cerr << "simulated " << set.frames.size() << " frames, " << set.total_points()
            << " points\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fit

struct FitOptions {
  std::string input = "-";
  std::string config_path;
  std::string output = "model.json";
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iterations;
  std::optional<double> tolerance;
  std::optional<double> epsilon;
  std::optional<std::string> init;
};

int cmd_fit(const FitOptions& opt) {
  radarseg::FitConfig config;
  radarseg::RunManifest manifest;
  manifest.command = "fit";
  if (!opt.config_path.empty()) {
    const NamedInput input = slurp_input(opt.config_path);
    config = radarseg::fit_config_from_json(parse_json_file(input));
    manifest.inputs.emplace_back(input.name, radarseg::digest_string(input.bytes));
  }
  if (opt.k) config.k = *opt.k;
  if (opt.seed) config.seed = *opt.seed;
  if (opt.max_iterations) config.max_iterations = *opt.max_iterations;
  if (opt.tolerance) config.rel_tolerance = *opt.tolerance;
  if (opt.epsilon) config.epsilon = *opt.epsilon;
  if (opt.init) {
    if (*opt.init == "kmeans") {
      config.init = radarseg::InitStrategy::kKmeansSeeded;
    } else if (*opt.init == "random") {
      config.init = radarseg::InitStrategy::kRandomResponsibility;
    } else {
      throw radarseg::ConfigError("--init must be \"kmeans\" or \"random\"");
    }
  }

  const NamedInput input = slurp_input(opt.input);
  manifest.inputs.emplace_back(input.name, radarseg::digest_string(input.bytes));
  const radarseg::FrameSet train = read_frame_input(input);
  manifest.config = radarseg::fit_config_to_json(config);
  manifest.config["input"] = input.name;

  auto [model, report] = radarseg::run_fit(train, config);

  ensure_parent_dir(opt.output);
  radarseg::save_model(model, manifest, opt.output);

  std::cout << "iterations=" << report.iterations << " log_likelihood=" << std::setprecision(12)
            << report.log_likelihood.back() << " converged=" << (report.converged ? "yes" : "no")
            << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// predict

struct PredictOptions {
  std::string model_path;
  std::string input = "-";
  std::string output = "-";
};

int cmd_predict(const PredictOptions& opt) {
  auto [model, model_manifest] = radarseg::load_model(opt.model_path);
  const NamedInput input = slurp_input(opt.input);
  const radarseg::FrameSet set = read_frame_input(input);

  const auto predictions = radarseg::predict_frame_set(model, set);
  std::ostringstream out;
  radarseg::write_predictions_csv(out, predictions);
  if (opt.output != "-") ensure_parent_dir(opt.output);
  write_output(opt.output, out.str());

  if (opt.output != "-") {
    radarseg::RunManifest manifest;
    manifest.command = "predict";
    manifest.config = json{{"model", opt.model_path}, {"input", input.name}};
    manifest.inputs.emplace_back(opt.model_path,
                                 radarseg::digest_string(radarseg::read_file(opt.model_path)));
    manifest.inputs.emplace_back(input.name, radarseg::digest_string(input.bytes));
    radarseg::write_manifest_sidecar(opt.output, manifest);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate / pr-curve

struct EvaluateOptions {
  std::string model_path;
  std::string input = "-";
  std::string truth_path;
  std::string output_dir = ".";
  double threshold_step = 0.05;
  bool store_label_map = false;
  bool curves_only = false;  // pr-curve subcommand
};

radarseg::RunManifest evaluation_manifest(const EvaluateOptions& opt, const NamedInput& frames,
                                          const NamedInput& truth) {
  radarseg::RunManifest manifest;
  manifest.command = opt.curves_only ? "pr-curve" : "evaluate";
  manifest.config = json{{"model", opt.model_path},
                         {"input", frames.name},
                         {"truth", truth.name},
                         {"threshold_step", opt.threshold_step}};
  manifest.inputs.emplace_back(opt.model_path,
                               radarseg::digest_string(radarseg::read_file(opt.model_path)));
  manifest.inputs.emplace_back(frames.name, radarseg::digest_string(frames.bytes));
  manifest.inputs.emplace_back(truth.name, radarseg::digest_string(truth.bytes));
  return manifest;
}

int cmd_evaluate(const EvaluateOptions& opt) {
  auto [model, model_manifest] = radarseg::load_model(opt.model_path);
  const NamedInput frames_input = slurp_input(opt.input);
  radarseg::FrameSet set = read_frame_input(frames_input);
  const NamedInput truth_input = slurp_input(opt.truth_path);
  {
    std::istringstream truth_stream(truth_input.bytes);
    radarseg::read_truth_csv(truth_stream, set);
  }

  const radarseg::EvalReport report = radarseg::run_evaluate(model, set, opt.threshold_step);
  const radarseg::RunManifest manifest = evaluation_manifest(opt, frames_input, truth_input);

  fs::create_directories(opt.output_dir);
  const fs::path dir(opt.output_dir);

  auto write_report_file = [&](const std::string& name, const std::string& content) {
    const std::string path = (dir / name).string();
    radarseg::write_file(path, content);
    radarseg::write_manifest_sidecar(path, manifest);
  };

  for (const radarseg::PrCurve& curve : report.curves) {
    std::ostringstream out;
    radarseg::write_pr_csv(out, curve);
    write_report_file("pr_" + radarseg::class_name(curve.class_code) + ".csv", out.str());
  }

  if (!opt.curves_only) {
    std::ostringstream metrics_out;
    radarseg::write_metrics_csv(metrics_out, report.per_class);
    write_report_file("metrics.csv", metrics_out.str());

    std::ostringstream confusion_out;
    radarseg::write_confusion_csv(confusion_out, report.confusion);
    write_report_file("confusion.csv", confusion_out.str());
  }

  if (opt.store_label_map && !report.label_map_from_model) {
    model.label_map = report.label_map;
    radarseg::save_model(model, manifest, opt.model_path);
  }

  std::cout << "points=" << report.total_points << " accuracy=" << std::fixed
            << std::setprecision(4) << report.accuracy
            << (report.label_map_from_model ? " label_map=stored" : " label_map=associated")
            << '\n';
  if (!opt.curves_only) {
    std::cout << "class,precision,recall,f1,iou,support\n";
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
      const radarseg::ClassMetrics& m = report.per_class[c];
      std::cout << radarseg::class_name(static_cast<int>(c)) << ',' << std::fixed
                << std::setprecision(4) << m.precision << ',' << m.recall << ',' << m.f1 << ','
                << m.iou << ',' << m.support << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-wise segmentation of radar point clouds with a Gaussian mixture model"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string(radarseg::kToolName) + " " + radarseg::kToolVersion);

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate a labeled synthetic scene");
  simulate->add_option("--config", sim.config_path, "Scene config JSON (defaults applied)");
  simulate->add_option("--output", sim.output, "Frame JSONL path, or - for stdout");
  simulate->add_option("--truth", sim.truth_path,
                       "Truth CSV path (derived from --output when omitted)");
  simulate->add_option("--seed", sim.seed, "Override the scene seed");
  simulate->add_option("--frames", sim.frames, "Override the frame count");
  simulate->add_flag("--quantize", sim.quantize_on, "Force measurement quantization on");
  simulate->add_flag("--no-quantize", sim.quantize_off, "Force measurement quantization off");

  FitOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit the mixture model on a frame stream");
  fit_cmd->add_option("--input", fit.input, "Frame JSONL path, or - for stdin");
  fit_cmd->add_option("--config", fit.config_path, "Fit config JSON");
  fit_cmd->add_option("--output", fit.output, "Model JSON path");
  fit_cmd->add_option("--k", fit.k, "Number of mixture components");
  fit_cmd->add_option("--seed", fit.seed, "Fit seed");
  fit_cmd->add_option("--max-iterations", fit.max_iterations, "Iteration budget");
  fit_cmd->add_option("--tolerance", fit.tolerance, "Relative log-likelihood tolerance");
  fit_cmd->add_option("--epsilon", fit.epsilon, "Covariance regularization");
  fit_cmd->add_option("--init", fit.init, "Initialization: kmeans or random");

  PredictOptions pred;
  CLI::App* predict = app.add_subcommand("predict", "Per-point MAP labels for a frame stream");
  predict->add_option("--model", pred.model_path, "Model JSON path")->required();
  predict->add_option("--input", pred.input, "Frame JSONL path, or - for stdin");
  predict->add_option("--output", pred.output, "Prediction CSV path, or - for stdout");

  EvaluateOptions eval;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score predictions against truth");
  evaluate->add_option("--model", eval.model_path, "Model JSON path")->required();
  evaluate->add_option("--input", eval.input, "Frame JSONL path, or - for stdin");
  evaluate->add_option("--truth", eval.truth_path, "Truth CSV path")->required();
  evaluate->add_option("--output", eval.output_dir, "Report directory");
  evaluate->add_option("--threshold-step", eval.threshold_step, "PR threshold grid step");
  evaluate->add_flag("--store-label-map", eval.store_label_map,
                     "Write the associated label map back into the model file");

  EvaluateOptions pr;
  pr.curves_only = true;
  CLI::App* pr_curve = app.add_subcommand("pr-curve", "Precision/recall sweeps per class");
  pr_curve->add_option("--model", pr.model_path, "Model JSON path")->required();
  pr_curve->add_option("--input", pr.input, "Frame JSONL path, or - for stdin");
  pr_curve->add_option("--truth", pr.truth_path, "Truth CSV path")->required();
  pr_curve->add_option("--output", pr.output_dir, "Report directory");
  pr_curve->add_option("--threshold-step", pr.threshold_step, "PR threshold grid step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (fit_cmd->parsed()) return cmd_fit(fit);
    if (predict->parsed()) return cmd_predict(pred);
    if (evaluate->parsed()) return cmd_evaluate(eval);
    if (pr_curve->parsed()) return cmd_evaluate(pr);
  } catch (const radarseg::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const radarseg::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const radarseg::MalformedFrameError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const radarseg::InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const radarseg::UnsupportedKError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const radarseg::InvalidThresholdError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const radarseg::ModelIoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const radarseg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
