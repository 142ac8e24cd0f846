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

#include <string>
#include <string_view>
#include <vector>

#include "fastdpm/schedule.hpp"

namespace fastdpm {

enum class ScheduleKind { kVarLinear, kVarQuadratic, kStepLinear, kStepQuadratic };
enum class Variant { kLinear, kQuadratic };

std::string_view to_string(ScheduleKind kind);
std::string_view to_string(Variant variant);
ScheduleKind parse_schedule_kind(std::string_view name);
Variant parse_variant(std::string_view name);
bool is_step_kind(ScheduleKind kind);
ScheduleKind make_kind(bool step, Variant variant);

/// An S-step approximate diffusion schedule.
///
/// Every per-step array has S + 1 entries indexed by s = 0..S. Entry 0 is
/// the s = 0 boundary: gamma_bar[0] = r[0] = 1, and eta, gamma, eta_tilde,
/// t_cont and tau are 0 there.
struct FastSchedule {
  ScheduleKind kind = ScheduleKind::kStepLinear;
  ScheduleDescriptor source;
  /// Number of steps actually used; can be below `requested_steps` when STEP
  /// deduplication dropped colliding steps.
  int steps = 0;
  int requested_steps = 0;
  /// The schedule constant: the root c for VAR kinds, the step spacing for
  /// STEP kinds.
  double c = 0.0;
  std::vector<double> eta;
  std::vector<double> gamma;
  std::vector<double> gamma_bar;
  std::vector<double> r;
  std::vector<double> eta_tilde;
  /// Continuous diffusion step fed to the ε-model at each s.
  std::vector<double> t_cont;
  /// Selected discrete steps; empty for VAR kinds.
  std::vector<int> tau;
  std::vector<std::string> warnings;

  bool is_step() const { return is_step_kind(kind); }
};

/// Noise levels from a subset of discrete steps: tau_s = ⌊(T/S) s⌋ (linear)
/// or ⌊(4/5)(T/S²) s²⌋ (quadratic). Steps that floor to 0 are clamped to 1
/// and repeated steps are dropped with a warning.
FastSchedule build_step_schedule(const NoiseLevelMap& map, int steps,
                                 Variant variant);

/// Noise levels from variances: eta_s = (1 + c s) beta_1 (linear) or
/// (1 + c s)² beta_1 (quadratic), with c > 0 solved so that
/// ∏ (1 − eta_s) = alpha_bar(T).
FastSchedule build_var_schedule(const NoiseLevelMap& map, int steps,
                                Variant variant);

FastSchedule build_fast_schedule(const NoiseLevelMap& map, ScheduleKind kind,
                                 int steps);

/// Checks that the cumulative product of (1 − eta_s) reproduces
/// alpha_bar(tau_s) for every s to 1e-12 relative. Only defined for STEP
/// schedules.
bool step_as_var_equivalence(const FastSchedule& schedule);

/// log ∏ (1 − eta_s) minus the log of its target: alpha_bar(T) for VAR
/// kinds, alpha_bar(tau_S) for STEP kinds.
double constraint_residual(const FastSchedule& schedule,
                           const VarianceSchedule& variance);

}  // namespace fastdpm
