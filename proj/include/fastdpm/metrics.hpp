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

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace fastdpm {

/// Gaussian moment fit of a sample set.
struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Sample mean and unbiased (n − 1) covariance of the rows of `samples`.
/// Needs at least d + 1 rows.
Moments sample_moments(const Eigen::MatrixXd& samples);

/// Symmetric PSD square root via eigendecomposition. Eigenvalues in
/// [−1e-10, 0) are treated as 0; anything more negative is an error.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

/// ‖μ₁ − μ₂‖² + tr(Σ₁ + Σ₂ − 2 (Σ₁^{1/2} Σ₂ Σ₁^{1/2})^{1/2}).
double frechet_distance(const Moments& a, const Moments& b);

/// Fréchet distance between the moment fits of two sample sets.
double frechet_distance(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& generated);

/// Fréchet distance between a sample set's fit and exact parameters.
double frechet_to_reference(const Eigen::MatrixXd& samples, const Moments& reference);

/// exp(mean_i KL(p_i ‖ p̄)) over the rows p_i of `probs`, with p̄ the row mean.
double inception_score(const Eigen::MatrixXd& probs);

/// Fraction of rows whose argmax (lowest index on ties) equals the label.
double accuracy(const Eigen::MatrixXd& probs, const std::vector<int>& labels);

struct MetricReport {
  double frechet = 0.0;
  std::optional<double> inception_score;
  std::optional<double> accuracy;
  std::int64_t generated_samples = 0;
  std::int64_t reference_samples = 0;  // 0 when compared to exact parameters
};

}  // namespace fastdpm
