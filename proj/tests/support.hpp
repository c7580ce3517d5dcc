// SPDX-License-Identifier: Apache-2.0
//
// Shared builders for randomized test inputs. Uses std::mt19937_64 directly
// so test data generation is independent of the library's own RNG.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "radarseg/gmm.hpp"
#include "radarseg/types.hpp"

namespace support {

/// Random symmetric positive definite matrix A Aᵀ + ridge I.
inline Eigen::MatrixXd random_spd(int d, std::mt19937_64& gen, double ridge = 0.5) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = normal(gen);
  }
  Eigen::MatrixXd spd = a * a.transpose();
  spd.diagonal().array() += ridge;
  return ((spd + spd.transpose()) * 0.5).eval();
}

inline Eigen::VectorXd random_vector(int d, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = normal(gen);
  return v;
}

/// Random valid mixture parameters.
inline radarseg::GmmParams random_params(int k, int d, std::mt19937_64& gen,
                                         double mean_scale = 3.0) {
  std::uniform_real_distribution<double> uniform(0.2, 1.0);
  radarseg::GmmParams params;
  params.weights.resize(k);
  for (int j = 0; j < k; ++j) params.weights[j] = uniform(gen);
  params.weights /= params.weights.sum();
  params.means.resize(k, d);
  for (int j = 0; j < k; ++j) params.means.row(j) = random_vector(d, gen, mean_scale).transpose();
  for (int j = 0; j < k; ++j) params.covariances.push_back(random_spd(d, gen));
  return params;
}

/// Draw n points from the mixture (independent of the library sampler).
inline Eigen::MatrixXd sample_mixture(const radarseg::GmmParams& params, int n,
                                      std::mt19937_64& gen) {
  std::discrete_distribution<int> component(params.weights.data(),
                                            params.weights.data() + params.k());
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = params.d();
  std::vector<Eigen::MatrixXd> chol;
  for (const Eigen::MatrixXd& cov : params.covariances) {
    chol.push_back(Eigen::LLT<Eigen::MatrixXd>(cov).matrixL());
  }
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i) {
    const int j = component(gen);
    Eigen::VectorXd z(d);
    for (int a = 0; a < d; ++a) z[a] = normal(gen);
    x.row(i) =
        (params.means.row(j).transpose() + chol[static_cast<std::size_t>(j)] * z).transpose();
  }
  return x;
}

/// Random valid polar point within the sensor's field of view.
inline radarseg::RadarPoint random_point(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  radarseg::RadarPoint p;
  p.r = 0.5 + 14.0 * u01(gen);
  p.theta_az = -89.0 + 178.0 * u01(gen);
  p.theta_el = -89.0 + 178.0 * u01(gen);
  p.vd = -10.0 + 20.0 * u01(gen);
  p.snr = 40.0 * u01(gen);
  p.noise = 5.0 + 15.0 * u01(gen);
  return p;
}

inline radarseg::TrackCentroid random_centroid(int track_id, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  radarseg::TrackCentroid c;
  c.track_id = track_id;
  c.px = -9.0 + 18.0 * u01(gen);
  c.py = 0.5 + 11.0 * u01(gen);
  c.pz = 3.0 * u01(gen);
  c.vx = -5.0 + 10.0 * u01(gen);
  c.vy = -5.0 + 10.0 * u01(gen);
  c.vz = -1.0 + 2.0 * u01(gen);
  return c;
}

}  // namespace support
