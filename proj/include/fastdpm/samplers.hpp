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
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fastdpm/epsilon_model.hpp"
#include "fastdpm/fast_schedule.hpp"
#include "fastdpm/random.hpp"
#include "fastdpm/schedule.hpp"

namespace fastdpm {

/// What to do with the noise term of the last reverse step.
enum class FinalStepNoise {
  kZero,     ///< no noise at the final step (DDPM reference practice)
  kLiteral,  ///< keep the noise term, using eta_tilde_1 = eta_1
};

enum class SamplerKind { kDdpmFull, kFastDdpm, kFastDdim };

std::string_view to_string(SamplerKind kind);
std::string_view to_string(FinalStepNoise mode);
SamplerKind parse_sampler_kind(std::string_view name);
FinalStepNoise parse_final_step_noise(std::string_view name);

struct SamplerConfig {
  double kappa = 0.0;
  std::uint64_t seed = 0;
  FinalStepNoise final_step_noise = FinalStepNoise::kZero;
  int batch = 1;
  /// Worker threads for independent chains; 0 picks hardware concurrency.
  int threads = 0;
  /// Keep every intermediate state in SampleBatch::step_trace.
  bool record_trace = false;
};

struct Provenance {
  ScheduleDescriptor schedule;
  SamplerKind sampler = SamplerKind::kDdpmFull;
  std::optional<ScheduleKind> fast_kind;
  /// Number of reverse steps: T for the full sampler, S otherwise.
  int steps = 0;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  FinalStepNoise final_step_noise = FinalStepNoise::kZero;
};

struct SampleBatch {
  /// batch × d, one chain per row.
  Eigen::MatrixXd samples;
  Provenance provenance;
  /// step_trace[k] holds every chain's state after k reverse steps
  /// (k = 0 is the initial Gaussian draw). Empty unless requested.
  std::vector<Eigen::MatrixXd> step_trace;
  /// ε-model evaluations, summed over chains.
  std::uint64_t model_calls = 0;
  /// Standard normal draws, summed over chains.
  std::uint64_t normal_draws = 0;
  /// Pre-specified class label per row for class-conditional batches;
  /// empty otherwise.
  std::vector<int> labels;
};

/// One draw from q(x_t | x_0) = N(sqrt(alpha_bar_t) x_0, (1 − alpha_bar_t) I).
Eigen::VectorXd forward_jump(const VarianceSchedule& schedule,
                             const Eigen::VectorXd& x0, int t,
                             RandomStream& rng);

/// One diffusion step q(x_t | x_{t−1}) = N(sqrt(1 − beta_t) x_{t−1}, beta_t I).
Eigen::VectorXd forward_step(const VarianceSchedule& schedule,
                             const Eigen::VectorXd& x_prev, int t,
                             RandomStream& rng);

/// Ancestral sampling through all T steps of the original reverse process.
SampleBatch ddpm_full_reverse(const VarianceSchedule& schedule,
                              const EpsilonModel& model,
                              const SamplerConfig& config);

/// FastDPM with the DDPM-style reverse update over an S-step schedule.
SampleBatch fastdpm_ddpm_rev(const FastSchedule& schedule,
                             const EpsilonModel& model,
                             const SamplerConfig& config);

/// FastDPM with the DDIM-style reverse update; config.kappa in [0, 1]
/// scales the injected noise (0 is deterministic, 1 matches DDPM-rev).
SampleBatch fastdpm_ddim_rev(const FastSchedule& schedule,
                             const EpsilonModel& model,
                             const SamplerConfig& config);

}  // namespace fastdpm
