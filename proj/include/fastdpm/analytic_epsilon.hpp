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

#include <map>
#include <memory>
#include <mutex>

#include "fastdpm/epsilon_model.hpp"
#include "fastdpm/gaussian_mixture.hpp"
#include "fastdpm/schedule.hpp"

namespace fastdpm {

/// MSE-optimal noise prediction for data drawn from `mixture`:
/// ε*(x, t) = −sqrt(1 − ā) ∇ₓ log q_t(x), where q_t is the mixture diffused to
/// ā = R(t)².
Eigen::VectorXd analytic_epsilon(const GaussianMixture& mixture,
                                 const NoiseLevelMap& map,
                                 const Eigen::VectorXd& x, double t);

/// log q_t(x) for the same diffused mixture.
double diffused_log_density(const GaussianMixture& mixture, const NoiseLevelMap& map,
                            const Eigen::VectorXd& x, double t);

/// analytic_epsilon as an EpsilonModel. Diffused mixtures (and their
/// Cholesky factors) are cached per queried t.
class AnalyticEpsilonModel final : public EpsilonModel {
 public:
  AnalyticEpsilonModel(GaussianMixture mixture, NoiseLevelMap map);

  Eigen::Index dimension() const override { return mixture_.dimension(); }
  Eigen::VectorXd predict(const Eigen::VectorXd& x, double t) const override;

  const GaussianMixture& mixture() const { return mixture_; }

 private:
  struct Entry {
    std::shared_ptr<const GaussianMixture> diffused;
    double noise_scale;
  };
  Entry lookup(double t) const;

  GaussianMixture mixture_;
  NoiseLevelMap map_;
  mutable std::mutex mutex_;
  mutable std::map<double, Entry> cache_;
};

}  // namespace fastdpm
