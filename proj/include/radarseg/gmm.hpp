// SPDX-License-Identifier: Apache-2.0
//
// Multivariate Gaussian mixture with EM fitting and posterior inference.
// All densities live in the log domain; mixtures reduce via log-sum-exp and
// covariances go through Cholesky factorizations, never explicit inverses.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "radarseg/errors.hpp"
#include "radarseg/labeling.hpp"
#include "radarseg/rng.hpp"
#include "radarseg/types.hpp"

namespace radarseg {

/// Mixture parameters: K weights, K mean rows, K full covariance matrices.
struct GmmParams {
  Eigen::VectorXd weights;             // K
  Eigen::MatrixXd means;               // K x d
  std::vector<Eigen::MatrixXd> covariances;  // K of d x d

  int k() const { return static_cast<int>(weights.size()); }
  int d() const { return static_cast<int>(means.cols()); }

  void validate() const {
    const int kk = k();
    if (kk < 1) throw ConfigError("GmmParams: K must be >= 1");
    if (means.rows() != kk || static_cast<int>(covariances.size()) != kk) {
      throw ConfigError("GmmParams: component counts disagree");
    }
    const int dd = d();
    if (dd < 1) throw ConfigError("GmmParams: dimension must be >= 1");
    double sum = 0.0;
    for (int i = 0; i < kk; ++i) {
      if (!(weights[i] >= 0.0)) throw ConfigError("GmmParams: weights must be non-negative");
      sum += weights[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ConfigError("GmmParams: weights must sum to 1 (got " + std::to_string(sum) + ")");
    }
    for (int i = 0; i < kk; ++i) {
      const Eigen::MatrixXd& cov = covariances[static_cast<std::size_t>(i)];
      if (cov.rows() != dd || cov.cols() != dd) {
        throw ConfigError("GmmParams: covariance " + std::to_string(i) + " has wrong shape");
      }
      const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
      if (asym > 1e-12) {
        throw ConfigError("GmmParams: covariance " + std::to_string(i) +
                          " is asymmetric by " + std::to_string(asym));
      }
      Eigen::LLT<Eigen::MatrixXd> llt(cov);
      if (llt.info() != Eigen::Success) {
        throw SingularCovarianceError(
            "GmmParams: covariance " + std::to_string(i) + " is not positive definite", i);
      }
    }
  }
};

enum class InitStrategy { kKmeansSeeded, kRandomResponsibility };

struct FitConfig {
  int k = 3;
  InitStrategy init = InitStrategy::kKmeansSeeded;
  std::uint64_t seed = 0;
  int max_iterations = 200;
  double rel_tolerance = 1e-6;
  double epsilon = 1e-6;  // covariance regularization added as epsilon * I

  void validate() const {
    if (k < 1) throw ConfigError("FitConfig: K must be >= 1");
    if (max_iterations < 1) throw ConfigError("FitConfig: max_iterations must be >= 1");
    if (!(rel_tolerance > 0.0)) throw ConfigError("FitConfig: rel_tolerance must be positive");
    if (!(epsilon > 0.0)) throw ConfigError("FitConfig: epsilon must be positive");
  }
};

struct FitReport {
  int iterations = 0;
  std::vector<double> log_likelihood;  // one entry per iteration
  bool converged = false;
  double final_epsilon = 0.0;
};

/// A fitted mixture, optionally carrying the cluster-to-class association.
struct GmmModel {
  GmmParams params;
  std::optional<LabelMap> label_map;
};

namespace detail {

/// Cholesky of a covariance; failures surface as SingularCovarianceError
/// tagged with the component they came from.
inline Eigen::LLT<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& cov, int component) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw SingularCovarianceError(
        "covariance of component " + std::to_string(component) + " is not positive definite",
        component);
  }
  return llt;
}

inline double half_log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace detail

/// ln N(x; mu, Sigma) for one point.
inline double gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                              const Eigen::MatrixXd& sigma) {
  const Eigen::Index d = x.size();
  if (mu.size() != d || sigma.rows() != d || sigma.cols() != d) {
    throw ConfigError("gaussian_logpdf: dimensions disagree");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw SingularCovarianceError("gaussian_logpdf: covariance is not positive definite");
  }
  Eigen::VectorXd v = x - mu;
  llt.matrixL().solveInPlace(v);
  return -0.5 * static_cast<double>(d) * std::log(2.0 * M_PI) -
         detail::half_log_det(llt) - 0.5 * v.squaredNorm();
}

/// ln [pi_k N_k(x_n)] for every point and component: the unnormalized
/// log scores behind both the responsibilities and the MAP rule.
inline Eigen::MatrixXd log_weighted_densities(const GmmParams& params,
                                              const Eigen::MatrixXd& x) {
  const int k = params.k();
  const int d = params.d();
  if (x.cols() != d) throw ConfigError("log_weighted_densities: data dimension disagrees");
  const Eigen::Index n = x.rows();
  const double norm = -0.5 * static_cast<double>(d) * std::log(2.0 * M_PI);

  Eigen::MatrixXd scores(n, k);
  for (int j = 0; j < k; ++j) {
    const auto llt = detail::factorize(params.covariances[static_cast<std::size_t>(j)], j);
    Eigen::MatrixXd centered =
        (x.rowwise() - params.means.row(j)).transpose();  // d x n
    llt.matrixL().solveInPlace(centered);
    const double log_weight = std::log(params.weights[j]);  // -inf for zero weight
    scores.col(j) =
        (centered.colwise().squaredNorm().transpose() * -0.5).array() + norm -
        detail::half_log_det(llt) + log_weight;
  }
  return scores;
}

/// Row-wise log(sum(exp(row))) with the usual max shift.
inline Eigen::VectorXd row_logsumexp(const Eigen::MatrixXd& m) {
  Eigen::VectorXd out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double mx = m.row(i).maxCoeff();
    if (!std::isfinite(mx)) {  // all -inf
      out[i] = mx;
      continue;
    }
    out[i] = mx + std::log((m.row(i).array() - mx).exp().sum());
  }
  return out;
}

/// Total data log-likelihood sum_n ln sum_k pi_k N_k(x_n).
inline double log_likelihood(const GmmParams& params, const Eigen::MatrixXd& x) {
  if (x.rows() < 1) throw InsufficientDataError("log_likelihood: need at least one point");
  return row_logsumexp(log_weighted_densities(params, x)).sum();
}

/// Responsibilities plus the log-likelihood both derive from the same score
/// matrix; fitting wants them together.
inline std::pair<Eigen::MatrixXd, double> e_step_with_loglik(const GmmParams& params,
                                                             const Eigen::MatrixXd& x) {
  Eigen::MatrixXd scores = log_weighted_densities(params, x);
  const Eigen::VectorXd lse = row_logsumexp(scores);
  scores.colwise() -= lse;
  return {scores.array().exp().matrix(), lse.sum()};
}

/// Posterior responsibility of each component for each point; rows sum to 1.
inline Eigen::MatrixXd e_step(const GmmParams& params, const Eigen::MatrixXd& x) {
  return e_step_with_loglik(params, x).first;
}

/// Closed-form parameter update from responsibilities. Covariances pick up
/// an epsilon * I regularization term. A component whose responsibility mass
/// vanishes raises ComponentCollapseError with its index.
inline GmmParams m_step(const Eigen::MatrixXd& responsibilities, const Eigen::MatrixXd& x,
                        double epsilon) {
  const Eigen::Index n = x.rows();
  const int d = static_cast<int>(x.cols());
  const int k = static_cast<int>(responsibilities.cols());
  if (responsibilities.rows() != n) throw ConfigError("m_step: row counts disagree");
  if (!(epsilon > 0.0)) throw ConfigError("m_step: epsilon must be positive");

  const double collapse_floor = static_cast<double>(d) *
                                std::numeric_limits<double>::epsilon() *
                                static_cast<double>(n);

  GmmParams params;
  params.weights.resize(k);
  params.means.resize(k, d);
  params.covariances.resize(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const Eigen::VectorXd gamma = responsibilities.col(j);
    const double nk = gamma.sum();
    if (!(nk > collapse_floor)) {
      throw ComponentCollapseError("m_step: component " + std::to_string(j) +
                                       " has no responsibility mass",
                                   j);
    }
    params.weights[j] = nk / static_cast<double>(n);
    params.means.row(j) = (gamma.transpose() * x) / nk;
    const Eigen::MatrixXd centered = x.rowwise() - params.means.row(j);
    Eigen::MatrixXd cov =
        (centered.transpose() * (centered.array().colwise() * gamma.array()).matrix()) / nk;
    cov = ((cov + cov.transpose()) * 0.5).eval();
    cov.diagonal().array() += epsilon;
    params.covariances[static_cast<std::size_t>(j)] = std::move(cov);
  }
  return params;
}

namespace detail {

inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  return (centered.transpose() * centered) / static_cast<double>(x.rows());
}

}  // namespace detail

/// Deterministic starting parameters. The kmeans-seeded strategy picks K
/// mutually far-apart data points as means (greedy farthest-point, first pick
/// drawn from the seed) with the global covariance as every component's
/// spread; the random-responsibility strategy normalizes a random matrix and
/// takes one M step.
inline GmmParams init_params(const Eigen::MatrixXd& x, const FitConfig& config) {
  config.validate();
  const Eigen::Index n = x.rows();
  const int d = static_cast<int>(x.cols());
  const int k = config.k;
  if (n < k) {
    throw InsufficientDataError("init_params: " + std::to_string(n) + " points for K=" +
                                std::to_string(k));
  }

  Rng rng(config.seed);

  if (k == 1) {
    GmmParams params;
    params.weights = Eigen::VectorXd::Ones(1);
    params.means = x.colwise().mean();
    Eigen::MatrixXd cov = detail::sample_covariance(x);
    cov.diagonal().array() += config.epsilon;
    params.covariances = {std::move(cov)};
    return params;
  }

  if (config.init == InitStrategy::kRandomResponsibility) {
    Eigen::MatrixXd resp(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      double sum = 0.0;
      for (int j = 0; j < k; ++j) {
        resp(i, j) = rng.uniform() + 1e-12;
        sum += resp(i, j);
      }
      resp.row(i) /= sum;
    }
    return m_step(resp, x, config.epsilon);
  }

  // Greedy farthest-point seeding.
  std::vector<Eigen::Index> seeds;
  seeds.push_back(static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(n))));
  Eigen::VectorXd min_dist2 =
      (x.rowwise() - x.row(seeds[0])).rowwise().squaredNorm();
  while (static_cast<int>(seeds.size()) < k) {
    Eigen::Index best = 0;
    min_dist2.maxCoeff(&best);
    seeds.push_back(best);
    min_dist2 = min_dist2.cwiseMin(
        (x.rowwise() - x.row(best)).rowwise().squaredNorm());
  }

  GmmParams params;
  params.weights = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  params.means.resize(k, d);
  for (int j = 0; j < k; ++j) params.means.row(j) = x.row(seeds[static_cast<std::size_t>(j)]);
  Eigen::MatrixXd cov = detail::sample_covariance(x);
  cov.diagonal().array() += config.epsilon;
  params.covariances.assign(static_cast<std::size_t>(k), cov);
  return params;
}

/// EM driver: alternate E and M steps until the relative log-likelihood
/// change drops below tolerance or the iteration budget runs out. On a
/// degenerate component the regularization scales up tenfold (capped at
/// 1e-2) and the component restarts at a random data point; three such
/// rescues and the fit fails.
inline std::pair<GmmModel, FitReport> fit_em(const Eigen::MatrixXd& x,
                                             const FitConfig& config) {
  config.validate();
  const Eigen::Index n = x.rows();
  if (n < config.k) {
    throw InsufficientDataError("fit_em: " + std::to_string(n) + " points for K=" +
                                std::to_string(config.k));
  }
  if (x.cols() < 1) throw ConfigError("fit_em: dimension must be >= 1");

  double epsilon = config.epsilon;
  GmmParams params = init_params(x, config);
  Eigen::MatrixXd global_cov = detail::sample_covariance(x);
  Rng rescue_rng(config.seed + 0x9e3779b97f4a7c15ULL);

  FitReport report;
  report.final_epsilon = epsilon;
  int rescues = 0;
  double prev_ll = std::numeric_limits<double>::quiet_NaN();

  auto rescue = [&](int component, const std::string& cause) {
    ++rescues;
    if (rescues > 3) {
      throw FitFailureError("fit_em: component " + std::to_string(component) +
                            " kept degenerating (" + cause + ") after 3 rescues; last epsilon " +
                            std::to_string(epsilon));
    }
    epsilon = std::min(epsilon * 10.0, 1e-2);
    report.final_epsilon = epsilon;
    const Eigen::Index pick =
        static_cast<Eigen::Index>(rescue_rng.uniform_index(static_cast<std::size_t>(n)));
    params.means.row(component) = x.row(pick);
    Eigen::MatrixXd cov = global_cov;
    cov.diagonal().array() += epsilon;
    params.covariances[static_cast<std::size_t>(component)] = std::move(cov);
    params.weights[component] = 1.0 / static_cast<double>(config.k);
    params.weights /= params.weights.sum();
    prev_ll = std::numeric_limits<double>::quiet_NaN();
  };

  while (report.iterations < config.max_iterations) {
    Eigen::MatrixXd resp;
    double ll = 0.0;
    try {
      std::tie(resp, ll) = e_step_with_loglik(params, x);
    } catch (const SingularCovarianceError& e) {
      rescue(e.component(), "singular covariance");
      continue;
    }
    report.log_likelihood.push_back(ll);
    ++report.iterations;

    if (std::isfinite(prev_ll) &&
        std::abs(ll - prev_ll) <= config.rel_tolerance * std::max(std::abs(ll), 1e-12)) {
      report.converged = true;
      break;
    }
    prev_ll = ll;

    try {
      params = m_step(resp, x, epsilon);
    } catch (const ComponentCollapseError& e) {
      rescue(e.component(), "responsibility collapse");
    }
  }

  params.validate();
  return {GmmModel{std::move(params), std::nullopt}, std::move(report)};
}

/// Responsibilities of one point under a fitted model.
inline Eigen::VectorXd posterior(const GmmModel& model, const FeatureVector& x) {
  return e_step(model.params, x.to_vector().transpose()).row(0);
}

inline Eigen::VectorXd posterior(const GmmModel& model, const Eigen::VectorXd& x) {
  return e_step(model.params, x.transpose()).row(0);
}

namespace detail {

template <typename Derived>
int argmax_lowest_tie(const Eigen::DenseBase<Derived>& v) {
  int best = 0;
  for (int j = 1; j < v.size(); ++j) {
    if (v(j) > v(best)) best = j;
  }
  return best;
}

}  // namespace detail

/// MAP component for one point, from the unnormalized log scores. Ties go to
/// the lowest component index.
inline int predict_map(const GmmModel& model, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd scores = log_weighted_densities(model.params, x.transpose());
  return detail::argmax_lowest_tie(scores.row(0));
}

inline int predict_map(const GmmModel& model, const FeatureVector& x) {
  const Eigen::VectorXd v = x.to_vector();
  return predict_map(model, v);
}

/// Thresholded one-vs-rest decision: does component k's posterior reach t?
inline bool predict_thresholded(const GmmModel& model, const FeatureVector& x, int k,
                                double threshold) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw InvalidThresholdError("predict_thresholded: threshold outside [0, 1]");
  }
  if (k < 0 || k >= model.params.k()) {
    throw ConfigError("predict_thresholded: component index out of range");
  }
  return posterior(model, x)[k] >= threshold;
}

}  // namespace radarseg
