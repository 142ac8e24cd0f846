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

#include <atomic>
#include <cstdint>

#include <Eigen/Core>

namespace fastdpm {

/// Noise predictor ε(x, t) queried at a continuous diffusion step t.
///
/// Implementations must be deterministic and must allow concurrent calls to
/// predict() from several threads.
class EpsilonModel {
 public:
  virtual ~EpsilonModel() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual Eigen::VectorXd predict(const Eigen::VectorXd& x, double t) const = 0;
};

/// Predicts zero noise everywhere.
class ZeroEpsilonModel final : public EpsilonModel {
 public:
  explicit ZeroEpsilonModel(Eigen::Index dimension) : dimension_(dimension) {}

  Eigen::Index dimension() const override { return dimension_; }
  Eigen::VectorXd predict(const Eigen::VectorXd& x, double) const override {
    return Eigen::VectorXd::Zero(x.size());
  }

 private:
  Eigen::Index dimension_;
};

/// Forwards to another model and counts the calls.
class CountingEpsilonModel final : public EpsilonModel {
 public:
  explicit CountingEpsilonModel(const EpsilonModel& inner) : inner_(inner) {}

  Eigen::Index dimension() const override { return inner_.dimension(); }
  Eigen::VectorXd predict(const Eigen::VectorXd& x, double t) const override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_.predict(x, t);
  }

  std::uint64_t calls() const { return calls_.load(); }
  void reset() { calls_.store(0); }

 private:
  const EpsilonModel& inner_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

}  // namespace fastdpm
