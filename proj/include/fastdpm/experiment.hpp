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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fastdpm/epsilon_model.hpp"
#include "fastdpm/fast_schedule.hpp"
#include "fastdpm/gaussian_mixture.hpp"
#include "fastdpm/metrics.hpp"
#include "fastdpm/samplers.hpp"
#include "fastdpm/schedule.hpp"
#include "fastdpm/serialization.hpp"

namespace fastdpm {

inline constexpr int kSweepSchemaVersion = 1;

struct ModelChoice {
  enum class Type { kAnalytic, kTrained };
  Type type = Type::kAnalytic;
  std::filesystem::path path;  // regressor prefix for kTrained
};

struct ExperimentConfig {
  ScheduleDescriptor schedule;
  /// Exactly one of data_preset / data_path is set.
  std::string data_preset;
  std::filesystem::path data_path;
  ModelChoice model;
  std::vector<bool> step_kinds;  // true = STEP, false = VAR
  std::vector<Variant> variants;
  std::vector<int> steps;
  std::vector<SamplerKind> samplers;
  std::vector<double> kappas;
  std::vector<std::uint64_t> seeds;
  int samples_per_cell = 2000;
  FinalStepNoise final_step_noise = FinalStepNoise::kZero;
  int threads = 0;
  /// The JSON the config was parsed from; hashed for provenance.
  Json source;
};

/// Parses and validates a sweep config. Throws ValidationError on any
/// problem, before any sampling work.
ExperimentConfig experiment_config_from_json(const Json& j);

GaussianMixture load_mixture(const ExperimentConfig& config);

struct SweepCell {
  std::size_t index = 0;
  ScheduleKind kind = ScheduleKind::kStepLinear;
  int steps = 0;
  SamplerKind sampler = SamplerKind::kFastDdpm;
  std::optional<double> kappa;  // DDIM-rev only
  std::uint64_t seed = 0;
};

/// Cartesian product kind × variant × S × (sampler, κ) × seed, in that
/// nesting order with seed innermost.
std::vector<SweepCell> expand_cells(const ExperimentConfig& config);

struct SweepRow {
  SweepCell cell;
  bool ok = false;
  std::string reason;
  int effective_steps = 0;
  MetricReport metrics;
  std::uint64_t model_calls_per_chain = 0;
  std::uint64_t normal_draws = 0;
  double seconds = 0.0;
};

struct SweepResult {
  std::uint64_t config_hash = 0;
  std::vector<SweepRow> rows;
};

SweepResult run_sweep(const ExperimentConfig& config);

/// CSV with a leading "# ..." provenance line; deterministic for a given
/// config (timings are not included).
std::string sweep_to_csv(const SweepResult& result);
Json sweep_to_json(const SweepResult& result, const ExperimentConfig& config);

/// Writes sweep.csv, sweep.json and timings.json into `dir`.
void write_sweep(const SweepResult& result, const ExperimentConfig& config,
                 const std::filesystem::path& dir);

/// Fréchet distance of the samples to the mixture's exact mean and
/// covariance, plus the Inception-Score analog (labeled mixtures) and
/// accuracy against `labels` (when given).
MetricReport evaluate_samples(const Eigen::MatrixXd& samples, const GaussianMixture& mixture,
                              const std::vector<int>& labels = {});

/// Table of r, eta, eta_tilde and t_cont per step, with the constraint
/// residual and (STEP kinds) the STEP-as-VAR check; JSON when `as_json`.
std::string inspect_schedule(const ScheduleDescriptor& descriptor, ScheduleKind kind,
                             int steps, bool as_json);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace fastdpm
