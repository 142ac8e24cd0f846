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

#include "fastdpm/metrics.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "fastdpm/error.hpp"

namespace fastdpm {
namespace {

constexpr double kEigenvalueClamp = -1e-10;
constexpr double kRowSumTolerance = 1e-9;

}  // namespace

Moments sample_moments(const Eigen::MatrixXd& samples) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index d = samples.cols();
  if (d < 1 || n < d + 1) {
    throw ValidationError("need at least d + 1 = " + std::to_string(d + 1) +
                          " samples for a covariance estimate, got " + std::to_string(n));
  }
  Moments m;
  m.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - m.mean.transpose();
  m.covariance = centered.transpose() * centered / double(n - 1);
  return m;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericError("eigendecomposition failed in matrix square root");
  }
  Eigen::VectorXd values = eig.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < kEigenvalueClamp) {
      throw NumericError("matrix square root of a matrix with eigenvalue " +
                         std::to_string(values[i]));
    }
    values[i] = std::sqrt(std::max(values[i], 0.0));
  }
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

double frechet_distance(const Moments& a, const Moments& b) {
  const Eigen::Index d = a.mean.size();
  if (b.mean.size() != d || a.covariance.rows() != d || b.covariance.rows() != d) {
    throw ValidationError("Fréchet distance between moments of different dimension");
  }
  const Eigen::MatrixXd root_a = psd_sqrt(a.covariance);
  const Eigen::MatrixXd cross = psd_sqrt(root_a * b.covariance * root_a);
  return (a.mean - b.mean).squaredNorm() + a.covariance.trace() + b.covariance.trace() -
         2.0 * cross.trace();
}

double frechet_distance(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& generated) {
  return frechet_distance(sample_moments(reference), sample_moments(generated));
}

double frechet_to_reference(const Eigen::MatrixXd& samples, const Moments& reference) {
  return frechet_distance(reference, sample_moments(samples));
}

double inception_score(const Eigen::MatrixXd& probs) {
  if (probs.rows() < 1 || probs.cols() < 1) {
    throw ValidationError("inception score needs a non-empty probability matrix");
  }
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    if (!probs.row(i).allFinite() || probs.row(i).minCoeff() < 0.0 ||
        std::abs(probs.row(i).sum() - 1.0) > kRowSumTolerance) {
      throw ValidationError("row " + std::to_string(i) + " is not a probability vector");
    }
  }
  const Eigen::RowVectorXd marginal = probs.colwise().mean();
  double total_kl = 0.0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    for (Eigen::Index k = 0; k < probs.cols(); ++k) {
      const double p = probs(i, k);
      if (p > 0.0) total_kl += p * (std::log(p) - std::log(marginal[k]));
    }
  }
  return std::exp(total_kl / double(probs.rows()));
}

double accuracy(const Eigen::MatrixXd& probs, const std::vector<int>& labels) {
  if (probs.rows() != Eigen::Index(labels.size())) {
    throw ValidationError("accuracy: " + std::to_string(probs.rows()) + " rows but " +
                          std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw ValidationError("accuracy of an empty set");
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index best = 0;
    probs.row(i).maxCoeff(&best);  // first maximum wins
    hits += best == labels[i];
  }
  return double(hits) / double(labels.size());
}

}  // namespace fastdpm
