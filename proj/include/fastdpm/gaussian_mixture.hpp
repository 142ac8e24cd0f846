// Copyright 2026 The FastDPM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "fastdpm/random.hpp"

namespace fastdpm {

/// Finite mixture of full-covariance Gaussians with optional class labels.
class GaussianMixture {
 public:
  /// Weights must be positive and sum to 1 within 1e-12; covariances must be
  /// symmetric positive definite. `labels` is empty or one id per component.
  GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                  std::vector<Eigen::MatrixXd> covariances,
                  std::vector<int> labels = {});

  Eigen::Index dimension() const { return means_.front().size(); }
  int num_components() const { return int(weights_.size()); }
  bool labeled() const { return !labels_.empty(); }
  /// 1 + the largest label; 0 for an unlabeled mixture.
  int num_labels() const;

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& means() const { return means_; }
  const std::vector<Eigen::MatrixXd>& covariances() const { return covariances_; }
  const std::vector<int>& labels() const { return labels_; }

  double log_density(const Eigen::VectorXd& x) const;
  /// ∇ₓ log p(x).
  Eigen::VectorXd score(const Eigen::VectorXd& x) const;
  /// Component posteriors p(k | x).
  Eigen::VectorXd responsibilities(const Eigen::VectorXd& x) const;

  /// Law of sqrt(a) x + sqrt(1 − a) ε for x from this mixture, ε ~ N(0, I).
  GaussianMixture diffused(double alpha_bar) const;
  /// The components carrying `label`, with renormalized weights.
  GaussianMixture restricted_to_label(int label) const;

  Eigen::VectorXd mean() const;
  Eigen::MatrixXd covariance() const;

  /// n × d matrix of draws.
  Eigen::MatrixXd sample(int n, RandomStream& rng) const;
  /// One draw; `component` receives the component index.
  Eigen::VectorXd sample_one(RandomStream& rng, int* component = nullptr) const;

 private:
  // log w_k + log N(x; mu_k, Sigma_k) for every k; also fills the whitened
  // residuals Sigma_k^{-1}(x − mu_k) when `precision_residuals` is non-null.
  Eigen::VectorXd joint_log_terms(const Eigen::VectorXd& x,
                                  std::vector<Eigen::VectorXd>* precision_residuals) const;

  std::vector<double> weights_;
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::MatrixXd> covariances_;
  std::vector<int> labels_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
  std::vector<double> log_normalizers_;
};

/// Bayes posterior over labels, p(label | x).
Eigen::VectorXd posterior_classifier(const GaussianMixture& mixture,
                                     const Eigen::VectorXd& x);

/// posterior_classifier applied to every row; n × num_labels.
Eigen::MatrixXd classify(const GaussianMixture& mixture, const Eigen::MatrixXd& samples);

/// Built-in mixtures: "gaussian2d" (N(0, I₂)), "gmm2" (two labeled
/// components at (±2, 0), covariance 0.05 I), "gmm3" (three labeled
/// components on a triangle).
GaussianMixture preset_mixture(std::string_view name);
std::vector<std::string_view> preset_names();

}  // namespace fastdpm
