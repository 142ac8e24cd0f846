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

#include "fastdpm/analytic_epsilon.hpp"

#include <cmath>

#include "fastdpm/error.hpp"

namespace fastdpm {
namespace {

constexpr std::size_t kMaxCachedSteps = 8192;

double alpha_bar_at(const NoiseLevelMap& map, double t) {
  const double a = std::exp(map.log_alpha_bar(t));
  if (!(a > 0.0 && a < 1.0)) {
    throw DomainError("analytic epsilon needs 0 < alpha_bar < 1 (t > 0)");
  }
  return a;
}

}  // namespace

Eigen::VectorXd analytic_epsilon(const GaussianMixture& mixture,
                                 const NoiseLevelMap& map,
                                 const Eigen::VectorXd& x, double t) {
  const double a = alpha_bar_at(map, t);
  return -std::sqrt(1.0 - a) * mixture.diffused(a).score(x);
}

double diffused_log_density(const GaussianMixture& mixture, const NoiseLevelMap& map,
                            const Eigen::VectorXd& x, double t) {
  return mixture.diffused(alpha_bar_at(map, t)).log_density(x);
}

AnalyticEpsilonModel::AnalyticEpsilonModel(GaussianMixture mixture, NoiseLevelMap map)
    : mixture_(std::move(mixture)), map_(std::move(map)) {}

AnalyticEpsilonModel::Entry AnalyticEpsilonModel::lookup(double t) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(t); it != cache_.end()) return it->second;
  }
  const double a = alpha_bar_at(map_, t);
  Entry entry{std::make_shared<const GaussianMixture>(mixture_.diffused(a)),
              std::sqrt(1.0 - a)};
  std::lock_guard lock(mutex_);
  if (cache_.size() >= kMaxCachedSteps) cache_.clear();
  cache_.emplace(t, entry);
  return entry;
}

Eigen::VectorXd AnalyticEpsilonModel::predict(const Eigen::VectorXd& x, double t) const {
  const Entry entry = lookup(t);
  return -entry.noise_scale * entry.diffused->score(x);
}

}  // namespace fastdpm
