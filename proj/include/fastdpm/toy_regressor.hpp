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
#include <vector>

#include <Eigen/Core>

#include "fastdpm/epsilon_model.hpp"
#include "fastdpm/gaussian_mixture.hpp"
#include "fastdpm/random.hpp"
#include "fastdpm/schedule.hpp"

namespace fastdpm {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out × in
  Eigen::VectorXd bias;
};

/// Small tanh MLP used as a trainable ε-model. The input is x concatenated
/// with t / T; the output layer is linear.
class ToyRegressor final : public EpsilonModel {
 public:
  /// Glorot-uniform hidden layers and a zero output layer, so the untrained
  /// model predicts ε = 0.
  ToyRegressor(Eigen::Index dimension, const std::vector<int>& hidden, int num_steps,
               RandomStream& rng);
  ToyRegressor(std::vector<DenseLayer> layers, int num_steps);

  Eigen::Index dimension() const override { return layers_.back().weight.rows(); }
  Eigen::VectorXd predict(const Eigen::VectorXd& x, double t) const override;

  /// Column-wise forward pass; `inputs` is (d + 1) × batch.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;

  /// Mean over columns of ‖forward(inputs) − targets‖², with its gradient
  /// with respect to every layer when `gradient` is non-null.
  double loss_and_gradient(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                           std::vector<DenseLayer>* gradient) const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }
  int num_steps() const { return num_steps_; }
  std::vector<int> widths() const;

 private:
  std::vector<DenseLayer> layers_;
  int num_steps_;
};

struct RegressorHyperparams {
  std::vector<int> hidden = {64, 64};
  int iterations = 20000;
  int batch = 256;
  double learning_rate = 0.01;
  double momentum = 0.9;
  /// Fraction of training after which the learning rate is multiplied by
  /// decay_factor.
  double decay_at = 0.7;
  double decay_factor = 0.1;
  /// Train on t uniform on (0, T]; false draws integer t uniform on 1..T.
  bool continuous_t = true;
  std::uint64_t seed = 0;
  int trace_every = 100;
  int heldout_samples = 20000;
};

struct TrainingResult {
  ToyRegressor model;
  /// Mean training loss over each window of trace_every iterations.
  std::vector<double> loss_trace;
  double initial_heldout = 0.0;
  double final_heldout = 0.0;
};

/// Fits a ToyRegressor to E‖ε − ε_θ(sqrt(ā_t) x₀ + sqrt(1 − ā_t) ε, t)‖² with
/// x₀ from `mixture`, by SGD with momentum.
TrainingResult train_toy_regressor(const GaussianMixture& mixture, const NoiseLevelMap& map,
                                   const RegressorHyperparams& hyper);

/// Monte-Carlo estimate of the same objective on `samples` fresh draws from
/// the stream seeded with `seed`.
double heldout_objective(const EpsilonModel& model, const GaussianMixture& mixture,
                         const NoiseLevelMap& map, int samples, std::uint64_t seed,
                         bool continuous_t = true);

}  // namespace fastdpm
