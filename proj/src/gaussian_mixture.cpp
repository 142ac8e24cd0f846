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

#include "fastdpm/gaussian_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "fastdpm/error.hpp"

namespace fastdpm {
namespace {

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

GaussianMixture::GaussianMixture(std::vector<double> weights,
                                 std::vector<Eigen::VectorXd> means,
                                 std::vector<Eigen::MatrixXd> covariances,
                                 std::vector<int> labels)
    : weights_(std::move(weights)),
      means_(std::move(means)),
      covariances_(std::move(covariances)),
      labels_(std::move(labels)) {
  const std::size_t K = weights_.size();
  if (K == 0) throw ValidationError("mixture needs at least one component");
  if (means_.size() != K || covariances_.size() != K) {
    throw ValidationError("mixture weights, means and covariances differ in length");
  }
  if (!labels_.empty() && labels_.size() != K) {
    throw ValidationError("mixture labels must be empty or one per component");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) throw ValidationError("mixture weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("mixture weights must sum to 1");
  }
  const Eigen::Index d = means_.front().size();
  if (d < 1) throw ValidationError("mixture dimension must be >= 1");
  for (std::size_t k = 0; k < K; ++k) {
    const Eigen::MatrixXd& cov = covariances_[k];
    if (means_[k].size() != d || cov.rows() != d || cov.cols() != d) {
      throw ValidationError("component " + std::to_string(k) + " has the wrong dimension");
    }
    if (!means_[k].allFinite() || !cov.allFinite()) {
      throw ValidationError("component " + std::to_string(k) + " is not finite");
    }
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
      throw ValidationError("covariance " + std::to_string(k) + " is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
      throw ValidationError("covariance " + std::to_string(k) +
                            " is not positive definite");
    }
    factors_.emplace_back(cov);
    if (factors_.back().info() != Eigen::Success) {
      throw NumericError("Cholesky factorization failed for component " +
                         std::to_string(k));
    }
    const Eigen::MatrixXd L = factors_.back().matrixL();
    const double log_det = 2.0 * L.diagonal().array().log().sum();
    log_normalizers_.push_back(
        -0.5 * (double(d) * std::log(2.0 * std::numbers::pi) + log_det));
  }
  for (int label : labels_) {
    if (label < 0) throw ValidationError("mixture labels must be non-negative");
  }
}

int GaussianMixture::num_labels() const {
  return labels_.empty() ? 0 : *std::max_element(labels_.begin(), labels_.end()) + 1;
}

Eigen::VectorXd GaussianMixture::joint_log_terms(
    const Eigen::VectorXd& x, std::vector<Eigen::VectorXd>* precision_residuals) const {
  if (x.size() != dimension()) {
    throw ValidationError("point dimension does not match the mixture");
  }
  const int K = num_components();
  Eigen::VectorXd terms(K);
  if (precision_residuals) precision_residuals->resize(K);
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXd diff = x - means_[k];
    const Eigen::VectorXd whitened = factors_[k].matrixL().solve(diff);
    terms[k] = std::log(weights_[k]) + log_normalizers_[k] - 0.5 * whitened.squaredNorm();
    if (precision_residuals) {
      (*precision_residuals)[k] = factors_[k].matrixU().solve(whitened);
    }
  }
  return terms;
}

double GaussianMixture::log_density(const Eigen::VectorXd& x) const {
  return log_sum_exp(joint_log_terms(x, nullptr));
}

Eigen::VectorXd GaussianMixture::responsibilities(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd terms = joint_log_terms(x, nullptr);
  return (terms.array() - log_sum_exp(terms)).exp();
}

Eigen::VectorXd GaussianMixture::score(const Eigen::VectorXd& x) const {
  std::vector<Eigen::VectorXd> residuals;
  const Eigen::VectorXd terms = joint_log_terms(x, &residuals);
  const Eigen::VectorXd resp = (terms.array() - log_sum_exp(terms)).exp();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
  for (int k = 0; k < num_components(); ++k) grad -= resp[k] * residuals[k];
  return grad;
}

GaussianMixture GaussianMixture::diffused(double alpha_bar) const {
  if (!(alpha_bar > 0.0 && alpha_bar <= 1.0)) {
    throw DomainError("diffusion coefficient alpha_bar must lie in (0, 1]");
  }
  const double signal = std::sqrt(alpha_bar);
  const Eigen::Index d = dimension();
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  for (int k = 0; k < num_components(); ++k) {
    means.push_back(signal * means_[k]);
    covs.push_back(alpha_bar * covariances_[k] +
                   (1.0 - alpha_bar) * Eigen::MatrixXd::Identity(d, d));
  }
  return GaussianMixture(weights_, std::move(means), std::move(covs), labels_);
}

GaussianMixture GaussianMixture::restricted_to_label(int label) const {
  if (!labeled()) throw UsageError("mixture has no labels");
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  std::vector<int> labels;
  double total = 0.0;
  for (int k = 0; k < num_components(); ++k) {
    if (labels_[k] != label) continue;
    weights.push_back(weights_[k]);
    means.push_back(means_[k]);
    covs.push_back(covariances_[k]);
    labels.push_back(label);
    total += weights_[k];
  }
  if (weights.empty()) {
    throw ValidationError("no component carries label " + std::to_string(label));
  }
  for (double& w : weights) w /= total;
  // Renormalization may leave the sum one ulp away from 1.
  weights.back() = 1.0 - std::accumulate(weights.begin(), weights.end() - 1, 0.0);
  return GaussianMixture(std::move(weights), std::move(means), std::move(covs),
                         std::move(labels));
}

Eigen::VectorXd GaussianMixture::mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dimension());
  for (int k = 0; k < num_components(); ++k) m += weights_[k] * means_[k];
  return m;
}

Eigen::MatrixXd GaussianMixture::covariance() const {
  const Eigen::VectorXd m = mean();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dimension(), dimension());
  for (int k = 0; k < num_components(); ++k) {
    const Eigen::VectorXd diff = means_[k] - m;
    c += weights_[k] * (covariances_[k] + diff * diff.transpose());
  }
  return c;
}

Eigen::VectorXd GaussianMixture::sample_one(RandomStream& rng, int* component) const {
  const double u = rng.uniform();
  int k = 0;
  double cumulative = weights_[0];
  while (u >= cumulative && k + 1 < num_components()) {
    cumulative += weights_[++k];
  }
  if (component) *component = k;
  return means_[k] + factors_[k].matrixL() * rng.normal_vector(dimension());
}

Eigen::MatrixXd GaussianMixture::sample(int n, RandomStream& rng) const {
  Eigen::MatrixXd out(n, dimension());
  for (int i = 0; i < n; ++i) out.row(i) = sample_one(rng).transpose();
  return out;
}

Eigen::VectorXd posterior_classifier(const GaussianMixture& mixture,
                                     const Eigen::VectorXd& x) {
  if (!mixture.labeled()) {
    throw UsageError("posterior classifier needs a labeled mixture");
  }
  const Eigen::VectorXd resp = mixture.responsibilities(x);
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(mixture.num_labels());
  for (int k = 0; k < mixture.num_components(); ++k) {
    probs[mixture.labels()[k]] += resp[k];
  }
  return probs;
}

Eigen::MatrixXd classify(const GaussianMixture& mixture, const Eigen::MatrixXd& samples) {
  Eigen::MatrixXd probs(samples.rows(), mixture.num_labels());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    probs.row(i) = posterior_classifier(mixture, samples.row(i).transpose()).transpose();
  }
  return probs;
}

std::vector<std::string_view> preset_names() { return {"gaussian2d", "gmm2", "gmm3"}; }

GaussianMixture preset_mixture(std::string_view name) {
  const Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2);
  if (name == "gaussian2d") {
    return GaussianMixture({1.0}, {Eigen::Vector2d(0.0, 0.0)}, {I2}, {0});
  }
  if (name == "gmm2") {
    return GaussianMixture({0.5, 0.5},
                           {Eigen::Vector2d(-2.0, 0.0), Eigen::Vector2d(2.0, 0.0)},
                           {0.05 * I2, 0.05 * I2}, {0, 1});
  }
  if (name == "gmm3") {
    const double h = std::sqrt(3.0);
    return GaussianMixture(
        {0.25, 0.25, 0.5},
        {Eigen::Vector2d(-1.5, -0.5 * h), Eigen::Vector2d(1.5, -0.5 * h),
         Eigen::Vector2d(0.0, h)},
        {0.05 * I2, 0.05 * I2, 0.1 * I2}, {0, 1, 2});
  }
  throw ValidationError("unknown mixture preset '" + std::string(name) + "'");
}

}  // namespace fastdpm
