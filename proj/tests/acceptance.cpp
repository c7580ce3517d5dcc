// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate. Runs nine end-to-end criteria and prints one PASS/FAIL
// line each; exits nonzero if any criterion fails. Where a criterion has a
// runtime budget the elapsed wall time is enforced, not just reported.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "radarseg/radarseg.hpp"
#include "support.hpp"

using namespace radarseg;

namespace {

struct Failure {
  std::string reason;
};

void fail(const std::string& reason) { throw Failure{reason}; }

void require(bool ok, const std::string& reason) {
  if (!ok) fail(reason);
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

FrameSet to_frame_set(const SimulatedScene& scene) {
  FrameSet set;
  set.frames = scene.frames;
  std::vector<std::vector<int>> truth;
  truth.reserve(scene.truth.size());
  for (const std::vector<ClassLabel>& labels : scene.truth) truth.push_back(to_codes(labels));
  set.truth = std::move(truth);
  return set;
}

int argmax_lowest(const Eigen::VectorXd& v) {
  int best = 0;
  for (int j = 1; j < v.size(); ++j) {
    if (v[j] > v[best]) best = j;
  }
  return best;
}

// ---------------------------------------------------------------------------

/// A1: log-likelihood trajectories never decrease, 100 seeded fits.
std::string check_monotonic_likelihood() {
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 gen(static_cast<std::uint64_t>(seed));
    const GmmParams truth = support::random_params(3, 5, gen);
    const Eigen::MatrixXd x = support::sample_mixture(truth, 500, gen);

    FitConfig config;
    config.k = 3;
    config.seed = static_cast<std::uint64_t>(seed);
    const auto [model, report] = fit_em(x, config);
    require(!report.log_likelihood.empty(), "seed " + std::to_string(seed) + ": empty trajectory");
    for (std::size_t i = 1; i < report.log_likelihood.size(); ++i) {
      const double prev = report.log_likelihood[i - 1];
      const double cur = report.log_likelihood[i];
      if (cur < prev - 1e-8) {
        fail("seed " + std::to_string(seed) + " step " + std::to_string(i) +
             ": log-likelihood fell from " + std::to_string(prev) + " to " + std::to_string(cur));
      }
    }
  }
  return "100 fits (N=500, d=5, K=3), every trajectory non-decreasing within 1e-8";
}

/// A2: parameter recovery on a well-separated three-component draw.
std::string check_parameter_recovery() {
  const int d = 5;
  const int k = 3;
  std::mt19937_64 gen(2020);

  GmmParams truth;
  truth.weights = Eigen::Vector3d(0.5, 0.3, 0.2);
  truth.means = Eigen::MatrixXd::Zero(k, d);
  truth.means(1, 0) = 10.0;
  truth.means(2, 1) = 10.0;
  for (int j = 0; j < k; ++j) {
    Eigen::MatrixXd cov = support::random_spd(d, gen);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    cov /= eig.eigenvalues().maxCoeff();  // largest component std is now 1
    truth.covariances.push_back(((cov + cov.transpose()) * 0.5).eval());
  }
  const double separation = 10.0;  // min pairwise mean distance; 5x the largest std is 5

  const int n = 20000;
  std::vector<int> labels;
  labels.reserve(n);
  Eigen::MatrixXd x(n, d);
  std::normal_distribution<double> normal(0.0, 1.0);
  int row = 0;
  for (int j = 0; j < k; ++j) {
    const int nj = static_cast<int>(std::lround(truth.weights[j] * n));
    const Eigen::MatrixXd chol =
        Eigen::LLT<Eigen::MatrixXd>(truth.covariances[static_cast<std::size_t>(j)]).matrixL();
    for (int i = 0; i < nj; ++i, ++row) {
      Eigen::VectorXd z(d);
      for (int a = 0; a < d; ++a) z[a] = normal(gen);
      x.row(row) = (truth.means.row(j).transpose() + chol * z).transpose();
      labels.push_back(j);
    }
  }
  require(row == n, "component counts did not add up");

  FitConfig config;
  config.k = k;
  config.seed = 7;
  const auto [model, report] = fit_em(x, config);

  const std::vector<int> clusters = predict_clusters(model, x);
  const LabelMap map = associate_labels(clusters, labels, k);

  for (int c = 0; c < k; ++c) {
    const int t = map.class_of(c);
    const double mean_err = (model.params.means.row(c) - truth.means.row(t)).norm();
    require(mean_err <= 0.02 * separation,
            "component " + std::to_string(c) + ": mean off by " + fmt(mean_err) +
                " (allowed " + fmt(0.02 * separation) + ")");
    const double weight_err = std::abs(model.params.weights[c] - truth.weights[t]);
    require(weight_err <= 0.02,
            "component " + std::to_string(c) + ": weight off by " + fmt(weight_err));
    const Eigen::MatrixXd& fit_cov = model.params.covariances[static_cast<std::size_t>(c)];
    const Eigen::MatrixXd& true_cov = truth.covariances[static_cast<std::size_t>(t)];
    const double cov_err = (fit_cov - true_cov).norm() / true_cov.norm();
    require(cov_err <= 0.10,
            "component " + std::to_string(c) + ": covariance off by " + fmt(cov_err) +
                " relative Frobenius");
  }
  return "means within 2% of separation, weights within 0.02, covariances within 10%";
}

/// A3: simulate, fit, associate, evaluate at full scale; IoU >= 0.5 per class.
std::string check_full_pipeline() {
  SceneConfig train_config = SceneConfig::traffic_default();  // 8000 frames, seed 1
  SceneConfig test_config = SceneConfig::traffic_default();
  test_config.frame_count = 1200;
  test_config.seed = 2;

  const FrameSet train = to_frame_set(simulate_scene(train_config));
  const FrameSet test = to_frame_set(simulate_scene(test_config));

  FitConfig config;
  config.k = 3;
  config.seed = 0;
  const auto [model, report] = run_fit(train, config);
  const EvalReport eval = run_evaluate(model, test);

  std::ostringstream csv;
  write_metrics_csv(csv, eval.per_class);
  write_file("acceptance_metrics.csv", csv.str());

  std::string ious;
  for (int c = 0; c < 3; ++c) {
    const double iou = eval.per_class[static_cast<std::size_t>(c)].iou;
    ious += (c ? ", " : "") + class_name(c) + " " + fmt(iou);
  }
  for (int c = 0; c < 3; ++c) {
    const double iou = eval.per_class[static_cast<std::size_t>(c)].iou;
    require(iou >= 0.50, class_name(c) + " IoU " + fmt(iou) + " below 0.50 (" + ious + ")");
  }
  return std::to_string(train.total_points()) + " train points, IoU " + ious +
         ", report in acceptance_metrics.csv";
}

/// A4: published precision/recall pairs reproduce their F1 and IoU through
/// the metrics module and the identity iou = f1 / (2 - f1).
std::string check_metric_identities() {
  struct Row {
    const char* name;
    double precision, recall, f1, iou;
  };
  const Row rows[] = {
      {"clutter", 0.71, 0.89, 0.79, 0.66},
      {"car", 0.88, 0.61, 0.72, 0.56},
      {"pedestrian", 0.85, 0.93, 0.89, 0.80},
  };
  for (const Row& row : rows) {
    const auto p = static_cast<std::int64_t>(std::lround(row.precision * 100));
    const auto r = static_cast<std::int64_t>(std::lround(row.recall * 100));
    // Integer confusion cells realizing the published rates exactly.
    const ClassMetrics m = binary_metrics(p * r, (100 - p) * r, p * (100 - r));
    require(std::abs(m.precision - row.precision) < 1e-12, std::string(row.name) + ": precision");
    require(std::abs(m.recall - row.recall) < 1e-12, std::string(row.name) + ": recall");
    require(std::abs(m.f1 - row.f1) <= 0.01,
            std::string(row.name) + ": F1 " + fmt(m.f1) + " vs published " + fmt(row.f1));
    const double iou_identity = m.f1 / (2.0 - m.f1);
    require(std::abs(iou_identity - row.iou) <= 0.01,
            std::string(row.name) + ": IoU " + fmt(iou_identity) + " vs published " +
                fmt(row.iou));
    require(std::abs(m.iou - iou_identity) < 1e-12,
            std::string(row.name) + ": direct IoU disagrees with the F1 identity");
  }
  return "3 published rows reproduce F1 and IoU within 0.01";
}

/// A5: MAP prediction agrees with posterior argmax and log-score argmax.
std::string check_map_consistency() {
  std::mt19937_64 gen(505);
  std::uniform_int_distribution<int> pick_k(1, 5);
  std::uniform_int_distribution<int> pick_d(2, 6);
  for (int i = 0; i < 1000; ++i) {
    const int k = pick_k(gen);
    const int d = pick_d(gen);
    const GmmModel model{support::random_params(k, d, gen), std::nullopt};
    const Eigen::VectorXd x = support::random_vector(d, gen, 4.0);

    const int map_label = predict_map(model, x);
    const int post_label = argmax_lowest(posterior(model, x));
    Eigen::MatrixXd one_row(1, d);
    one_row.row(0) = x.transpose();
    const Eigen::VectorXd scores =
        log_weighted_densities(model.params, one_row).row(0).transpose();
    const int score_label = argmax_lowest(scores);

    if (map_label != post_label || map_label != score_label) {
      fail("case " + std::to_string(i) + ": map=" + std::to_string(map_label) +
           " posterior=" + std::to_string(post_label) + " score=" + std::to_string(score_label));
    }
  }
  return "1000 random (model, point) pairs agree exactly";
}

/// A6: label association equals exhaustive search.
std::string check_association_oracle() {
  std::mt19937_64 gen(606);
  int cases = 0;
  for (int k = 2; k <= 5; ++k) {
    for (int rep = 0; rep < 25; ++rep, ++cases) {
      std::uniform_int_distribution<int> pick(0, k - 1);
      const int n = 30;
      std::vector<int> clusters(n), truth(n);
      for (int i = 0; i < n; ++i) {
        clusters[static_cast<std::size_t>(i)] = pick(gen);
        truth[static_cast<std::size_t>(i)] = pick(gen);
      }
      const LabelMap map = associate_labels(clusters, truth, k);

      std::vector<std::vector<std::int64_t>> counts(
          static_cast<std::size_t>(k), std::vector<std::int64_t>(static_cast<std::size_t>(k), 0));
      for (int i = 0; i < n; ++i) {
        ++counts[static_cast<std::size_t>(clusters[static_cast<std::size_t>(i)])]
                [static_cast<std::size_t>(truth[static_cast<std::size_t>(i)])];
      }
      const std::vector<int> expected = oracles::best_assignment(counts);
      if (map.cluster_to_class != expected) {
        fail("K=" + std::to_string(k) + " rep " + std::to_string(rep) +
             ": association disagrees with exhaustive search");
      }
    }
  }
  return std::to_string(cases) + " random instances, K in {2..5}, exact agreement";
}

/// A7: feature extraction against the long-double oracle.
std::string check_feature_oracle() {
  std::mt19937_64 gen(707);
  std::bernoulli_distribution with_track(0.5);
  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
  };
  for (int i = 0; i < 10000; ++i) {
    const RadarPoint p = support::random_point(gen);
    TrackCentroid centroid = support::random_centroid(0, gen);
    const TrackCentroid* maybe = with_track(gen) ? &centroid : nullptr;
    const FeatureVector got = extract_features(p, maybe);
    const FeatureVector want = oracles::features(p, maybe);
    if (!close(got.dx, want.dx) || !close(got.dy, want.dy) || !close(got.dz, want.dz) ||
        !close(got.dd, want.dd) || !close(got.sigma, want.sigma)) {
      fail("case " + std::to_string(i) + (maybe ? " (tracked)" : " (no track)") +
           ": features diverge from the oracle");
    }
  }
  return "10000 random inputs within 1e-12 relative, both branches";
}

/// A8: persistence round trip is bit-exact and saving is idempotent.
std::string check_persistence() {
  std::mt19937_64 gen(808);
  GmmModel model;
  model.params = support::random_params(3, 5, gen);
  model.label_map = LabelMap{{1, 2, 0}};
  RunManifest manifest;
  manifest.command = "fit";
  manifest.config = {{"k", 3}};

  namespace fs = std::filesystem;
  const std::string first_path = (fs::temp_directory_path() / "acceptance_model_a.json").string();
  const std::string second_path = (fs::temp_directory_path() / "acceptance_model_b.json").string();
  save_model(model, manifest, first_path);
  auto [loaded, loaded_manifest] = load_model(first_path);

  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd x = support::random_vector(5, gen, 3.0);
    const Eigen::VectorXd before = posterior(model, x);
    const Eigen::VectorXd after = posterior(loaded, x);
    if (!(before.array() == after.array()).all()) {
      fail("posterior differs after reload at case " + std::to_string(i));
    }
    if (predict_map(model, x) != predict_map(loaded, x)) {
      fail("MAP label differs after reload at case " + std::to_string(i));
    }
  }

  save_model(loaded, loaded_manifest, second_path);
  const std::string first = read_file(first_path);
  const std::string second = read_file(second_path);
  std::remove(first_path.c_str());
  std::remove(second_path.c_str());
  require(first == second, "re-saving a loaded model changed the bytes");
  return "1000 points bit-identical, save idempotent";
}

/// A9: responsibilities normalize and updated covariances stay symmetric
/// positive definite with eigenvalues >= epsilon.
std::string check_posterior_normalization() {
  std::mt19937_64 gen(909);
  std::uniform_int_distribution<int> pick_k(1, 6);
  std::uniform_int_distribution<int> pick_d(2, 6);
  int rows_checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int k = pick_k(gen);
    const int d = pick_d(gen);
    const GmmParams params = support::random_params(k, d, gen);
    const Eigen::MatrixXd x = support::sample_mixture(params, 100, gen);
    const Eigen::MatrixXd resp = e_step(params, x);
    for (Eigen::Index i = 0; i < resp.rows(); ++i, ++rows_checked) {
      const double sum = resp.row(i).sum();
      if (std::abs(sum - 1.0) > 1e-9) {
        fail("rep " + std::to_string(rep) + " row " + std::to_string(i) +
             ": responsibilities sum to " + std::to_string(sum));
      }
    }

    const double epsilon = (rep % 2 == 0) ? 1e-6 : 1e-3;
    const GmmParams updated = m_step(resp, x, epsilon);
    for (int j = 0; j < k; ++j) {
      const Eigen::MatrixXd& cov = updated.covariances[static_cast<std::size_t>(j)];
      const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
      require(asym <= 1e-12, "rep " + std::to_string(rep) + ": covariance asymmetry " + fmt(asym));
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
      const double min_eig = eig.eigenvalues().minCoeff();
      require(min_eig >= epsilon - 1e-12,
              "rep " + std::to_string(rep) + ": min eigenvalue " + fmt(min_eig) +
                  " below epsilon " + fmt(epsilon));
    }
  }
  return std::to_string(rows_checked) + " responsibility rows sum to 1 within 1e-9; " +
         "updated covariances symmetric with eigenvalues >= epsilon";
}

// ---------------------------------------------------------------------------

struct Criterion {
  const char* id;
  std::string (*body)();
  double budget_seconds;  // 0 means no budget
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"A1", check_monotonic_likelihood, 30.0},
      {"A2", check_parameter_recovery, 20.0},
      {"A3", check_full_pipeline, 120.0},
      {"A4", check_metric_identities, 0.0},
      {"A5", check_map_consistency, 0.0},
      {"A6", check_association_oracle, 0.0},
      {"A7", check_feature_oracle, 0.0},
      {"A8", check_persistence, 0.0},
      {"A9", check_posterior_normalization, 0.0},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    std::optional<std::string> error;
    try {
      detail = c.body();
    } catch (const Failure& f) {
      error = f.reason;
    } catch (const std::exception& e) {
      error = std::string("unexpected error: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!error && c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
      error = "took " + fmt(seconds) + " s, budget " + fmt(c.budget_seconds) + " s";
    }
    if (error) {
      ++failures;
      std::cout << c.id << " FAIL  " << *error << "\n";
    } else {
      std::cout << c.id << " PASS  " << detail << "  [" << fmt(seconds) << " s]\n";
    }
    std::cout.flush();
  }

  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
