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

#include <span>
#include <vector>

namespace fastdpm {

/// The (beta_1, beta_T, T) triple describing a linear variance schedule.
struct ScheduleDescriptor {
  double beta_1 = 1e-4;
  double beta_T = 0.02;
  int num_steps = 1000;

  bool operator==(const ScheduleDescriptor&) const = default;
};

/// Discrete linear variance schedule of a pretrained diffusion model.
///
/// Per-step arrays are indexed by the diffusion step t = 0..T. Index 0 is a
/// sentinel: beta(0) = 0 and alpha_bar(0) = 1, so that recursions starting
/// at t = 1 need no special case.
class VarianceSchedule {
 public:
  VarianceSchedule(double beta_1, double beta_T, int num_steps);
  explicit VarianceSchedule(const ScheduleDescriptor& descriptor);

  const ScheduleDescriptor& descriptor() const noexcept { return descriptor_; }
  int num_steps() const noexcept { return descriptor_.num_steps; }
  double beta_1() const noexcept { return descriptor_.beta_1; }
  double beta_T() const noexcept { return descriptor_.beta_T; }
  double delta_beta() const noexcept { return delta_beta_; }
  /// (1 − beta_1) / delta_beta; the Gamma extension is defined for t < beta_hat.
  double beta_hat() const noexcept { return beta_hat_; }

  double beta(int t) const;
  double alpha(int t) const;
  double alpha_bar(int t) const;
  double beta_tilde(int t) const;

  /// alpha_bar for t = 0..T (T + 1 entries, decreasing).
  std::span<const double> alpha_bar_table() const noexcept { return alpha_bar_; }

 private:
  void check_step(int t, int lo) const;

  ScheduleDescriptor descriptor_;
  double delta_beta_;
  double beta_hat_;
  std::vector<double> beta_;
  std::vector<double> alpha_bar_;
  std::vector<double> beta_tilde_;
};

/// ∏_{i=1}^{t} (1 − beta_i) evaluated as an explicit product.
double alpha_bar_product(const VarianceSchedule& schedule, int t);

/// Bijection between continuous diffusion steps t ∈ [0, T] and noise levels
/// r = R(t) = sqrt(alpha_bar(t)), with alpha_bar extended to real t through
/// the Gamma function.
class NoiseLevelMap {
 public:
  static constexpr double kDefaultTolerance = 1e-10;
  static constexpr int kDefaultMaxIterations = 100;

  explicit NoiseLevelMap(VarianceSchedule schedule,
                         double tolerance = kDefaultTolerance,
                         int max_iterations = kDefaultMaxIterations);

  const VarianceSchedule& schedule() const noexcept { return schedule_; }
  double tolerance() const noexcept { return tolerance_; }
  int max_iterations() const noexcept { return max_iterations_; }

  /// R(t) for t ∈ [0, T], via log-Gamma.
  double noise_level(double t) const;

  /// 2 log R(t) for t ∈ [0, T], via log-Gamma.
  double log_alpha_bar(double t) const;

  /// 2 log R(t) from the one-term Stirling expansion, for 0 ≤ t < beta_hat.
  double log_noise_level_stirling(double t) const;

  struct Inversion {
    double step = 0.0;
    int iterations = 0;
  };

  /// Solves R(t) = r for t. The search starts from the unit bracket
  /// [t0, t0 + 1] with sqrt(alpha_bar(t0 + 1)) <= r <= sqrt(alpha_bar(t0)),
  /// found by bisection over the alpha_bar table, and stops once
  /// |2 log R(t) − 2 log r| <= tolerance.
  Inversion invert(double r) const;

  /// T(r); shorthand for invert(r).step.
  double step_of_noise_level(double r) const { return invert(r).step; }

 private:
  VarianceSchedule schedule_;
  double tolerance_;
  int max_iterations_;
  double log_alpha_bar_end_;
};

}  // namespace fastdpm
