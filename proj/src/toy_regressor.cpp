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

#include "fastdpm/toy_regressor.hpp"

#include <cmath>
#include <string>

#include "fastdpm/error.hpp"

namespace fastdpm {
namespace {

constexpr std::uint64_t kHeldoutSalt = 0x68656c646f7574ULL;

struct TrainingDraw {
  Eigen::VectorXd noisy;
  Eigen::VectorXd noise;
  double t;
};

TrainingDraw draw_training_pair(const GaussianMixture& mixture, const NoiseLevelMap& map,
                                bool continuous_t, RandomStream& rng) {
  const int T = map.schedule().num_steps();
  const double u = rng.uniform();
  const double t = continuous_t ? T * (1.0 - u) : 1.0 + std::floor(u * T);
  const double a = std::exp(map.log_alpha_bar(t));
  const Eigen::VectorXd x0 = mixture.sample_one(rng);
  Eigen::VectorXd noise = rng.normal_vector(mixture.dimension());
  return {std::sqrt(a) * x0 + std::sqrt(1.0 - a) * noise, std::move(noise), t};
}

}  // namespace

ToyRegressor::ToyRegressor(Eigen::Index dimension, const std::vector<int>& hidden,
                           int num_steps, RandomStream& rng)
    : num_steps_(num_steps) {
  if (dimension < 1 || num_steps < 1) {
    throw ValidationError("regressor needs dimension >= 1 and T >= 1");
  }
  Eigen::Index in = dimension + 1;
  for (int width : hidden) {
    if (width < 1) throw ValidationError("hidden widths must be positive");
    const double limit = std::sqrt(6.0 / double(in + width));
    DenseLayer layer{Eigen::MatrixXd(width, in), Eigen::VectorXd::Zero(width)};
    for (Eigen::Index j = 0; j < in; ++j) {
      for (Eigen::Index i = 0; i < width; ++i) {
        layer.weight(i, j) = limit * (2.0 * rng.uniform() - 1.0);
      }
    }
    layers_.push_back(std::move(layer));
    in = width;
  }
  layers_.push_back(
      {Eigen::MatrixXd::Zero(dimension, in), Eigen::VectorXd::Zero(dimension)});
}

ToyRegressor::ToyRegressor(std::vector<DenseLayer> layers, int num_steps)
    : layers_(std::move(layers)), num_steps_(num_steps) {
  if (layers_.empty() || num_steps < 1) {
    throw ValidationError("regressor needs at least one layer and T >= 1");
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.bias.size() != layer.weight.rows() ||
        (l > 0 && layer.weight.cols() != layers_[l - 1].weight.rows())) {
      throw ValidationError("regressor layer " + std::to_string(l) +
                            " has inconsistent shape");
    }
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
      throw ValidationError("regressor parameters must be finite");
    }
  }
  if (layers_.front().weight.cols() != layers_.back().weight.rows() + 1) {
    throw ValidationError("regressor input width must be output width + 1");
  }
}

std::vector<int> ToyRegressor::widths() const {
  std::vector<int> w{int(layers_.front().weight.cols())};
  for (const auto& layer : layers_) w.push_back(int(layer.weight.rows()));
  return w;
}

Eigen::MatrixXd ToyRegressor::forward(const Eigen::MatrixXd& inputs) const {
  Eigen::MatrixXd h = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = (layers_[l].weight * h).colwise() + layers_[l].bias;
    h = l + 1 < layers_.size() ? Eigen::MatrixXd(z.array().tanh()) : std::move(z);
  }
  return h;
}

Eigen::VectorXd ToyRegressor::predict(const Eigen::VectorXd& x, double t) const {
  if (x.size() != dimension()) {
    throw ValidationError("regressor input has the wrong dimension");
  }
  Eigen::MatrixXd input(x.size() + 1, 1);
  input.col(0).head(x.size()) = x;
  input(x.size(), 0) = t / num_steps_;
  return forward(input).col(0);
}

double ToyRegressor::loss_and_gradient(const Eigen::MatrixXd& inputs,
                                       const Eigen::MatrixXd& targets,
                                       std::vector<DenseLayer>* gradient) const {
  const std::size_t L = layers_.size();
  const double batch = double(inputs.cols());
  // activations[l] is the input to layer l; activations[L] is the output.
  std::vector<Eigen::MatrixXd> activations{inputs};
  activations.reserve(L + 1);
  for (std::size_t l = 0; l < L; ++l) {
    Eigen::MatrixXd z = (layers_[l].weight * activations[l]).colwise() + layers_[l].bias;
    if (l + 1 < L) z = z.array().tanh();
    activations.push_back(std::move(z));
  }
  const Eigen::MatrixXd residual = activations[L] - targets;
  const double loss = residual.squaredNorm() / batch;
  if (!gradient) return loss;

  gradient->resize(L);
  Eigen::MatrixXd delta = (2.0 / batch) * residual;
  for (std::size_t l = L; l-- > 0;) {
    (*gradient)[l].weight = delta * activations[l].transpose();
    (*gradient)[l].bias = delta.rowwise().sum();
    if (l > 0) {
      delta = (layers_[l].weight.transpose() * delta).array() *
              (1.0 - activations[l].array().square());
    }
  }
  return loss;
}

double heldout_objective(const EpsilonModel& model, const GaussianMixture& mixture,
                         const NoiseLevelMap& map, int samples, std::uint64_t seed,
                         bool continuous_t) {
  if (samples < 1) throw ValidationError("held-out objective needs samples >= 1");
  RandomStream rng(seed);
  double total = 0.0;
  for (int i = 0; i < samples; ++i) {
    const TrainingDraw draw = draw_training_pair(mixture, map, continuous_t, rng);
    total += (draw.noise - model.predict(draw.noisy, draw.t)).squaredNorm();
  }
  return total / samples;
}

TrainingResult train_toy_regressor(const GaussianMixture& mixture, const NoiseLevelMap& map,
                                   const RegressorHyperparams& hyper) {
  if (hyper.iterations < 1 || hyper.batch < 1 || hyper.trace_every < 1 ||
      !(hyper.learning_rate > 0.0) || !(hyper.momentum >= 0.0 && hyper.momentum < 1.0) ||
      !std::isfinite(hyper.decay_at) || !(hyper.decay_factor > 0.0)) {
    throw ValidationError("invalid regressor hyperparameters");
  }
  const Eigen::Index d = mixture.dimension();
  const int T = map.schedule().num_steps();
  RandomStream rng(hyper.seed);
  TrainingResult result{ToyRegressor(d, hyper.hidden, T, rng), {}, 0.0, 0.0};
  ToyRegressor& model = result.model;
  const std::uint64_t heldout_seed = mix64(hyper.seed ^ kHeldoutSalt);
  result.initial_heldout = heldout_objective(model, mixture, map, hyper.heldout_samples,
                                             heldout_seed, hyper.continuous_t);

  std::vector<DenseLayer> velocity;
  for (const auto& layer : model.layers()) {
    velocity.push_back({Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()),
                        Eigen::VectorXd::Zero(layer.bias.size())});
  }
  std::vector<DenseLayer> grad;
  Eigen::MatrixXd inputs(d + 1, hyper.batch);
  Eigen::MatrixXd targets(d, hyper.batch);
  const int decay_iteration = int(hyper.decay_at * hyper.iterations);
  double window = 0.0;
  double lr = hyper.learning_rate;

  for (int iter = 0; iter < hyper.iterations; ++iter) {
    if (iter == decay_iteration) lr *= hyper.decay_factor;
    for (int b = 0; b < hyper.batch; ++b) {
      const TrainingDraw draw = draw_training_pair(mixture, map, hyper.continuous_t, rng);
      inputs.col(b).head(d) = draw.noisy;
      inputs(d, b) = draw.t / T;
      targets.col(b) = draw.noise;
    }
    const double loss = model.loss_and_gradient(inputs, targets, &grad);
    if (!std::isfinite(loss)) {
      std::string trace;
      for (double v : result.loss_trace) trace += " " + std::to_string(v);
      throw TrainingError("training diverged at iteration " + std::to_string(iter) +
                          "; loss trace:" + trace);
    }
    auto& layers = model.mutable_layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      velocity[l].weight = hyper.momentum * velocity[l].weight + grad[l].weight;
      velocity[l].bias = hyper.momentum * velocity[l].bias + grad[l].bias;
      layers[l].weight -= lr * velocity[l].weight;
      layers[l].bias -= lr * velocity[l].bias;
    }
    window += loss;
    if ((iter + 1) % hyper.trace_every == 0) {
      result.loss_trace.push_back(window / hyper.trace_every);
      window = 0.0;
    }
  }
  result.final_heldout = heldout_objective(model, mixture, map, hyper.heldout_samples,
                                           heldout_seed, hyper.continuous_t);
  return result;
}

}  // namespace fastdpm
