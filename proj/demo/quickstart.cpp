// SPDX-License-Identifier: Apache-2.0
//
// Minimal end-to-end walk: simulate a short labeled scene, fit the mixture,
// associate clusters with classes, and print per-class metrics.

#include <iostream>

#include "radarseg/radarseg.hpp"

int main() {
  using namespace radarseg;

  SceneConfig train_config = SceneConfig::traffic_default();
  train_config.frame_count = 500;
  SceneConfig test_config = train_config;
  test_config.frame_count = 200;
  test_config.seed = train_config.seed + 1;

  auto as_frame_set = [](const SimulatedScene& scene) {
    FrameSet set;
    set.frames = scene.frames;
    std::vector<std::vector<int>> truth;
    for (const auto& labels : scene.truth) truth.push_back(to_codes(labels));
    set.truth = std::move(truth);
    return set;
  };
  const FrameSet train = as_frame_set(simulate_scene(train_config));
  const FrameSet test = as_frame_set(simulate_scene(test_config));
  std::cout << "train: " << train.total_points() << " points over " << train.frames.size()
            << " frames\n";

  FitConfig fit_config;
  fit_config.k = 3;
  auto [model, report] = run_fit(train, fit_config);
  std::cout << "fit: " << report.iterations << " iterations, log-likelihood "
            << report.log_likelihood.back() << (report.converged ? " (converged)" : "") << "\n";

  const EvalReport eval = run_evaluate(model, test);
  std::cout << "test: " << eval.total_points << " points, accuracy " << eval.accuracy << "\n";
  for (std::size_t c = 0; c < eval.per_class.size(); ++c) {
    const ClassMetrics& m = eval.per_class[c];
    std::cout << "  " << class_name(static_cast<int>(c)) << ": precision " << m.precision
              << ", recall " << m.recall << ", f1 " << m.f1 << ", iou " << m.iou << "\n";
  }
  return 0;
}
