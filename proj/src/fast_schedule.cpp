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

#include "fastdpm/fast_schedule.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "fastdpm/error.hpp"

namespace fastdpm {
namespace {

constexpr double kMaxEta = 1.0 - 1e-6;
constexpr double kRootTolerance = 1e-13;
constexpr double kConstraintTolerance = 1e-10;
constexpr int kMaxRootIterations = 400;

void fill_derived(FastSchedule& fs) {
  const int S = fs.steps;
  fs.eta_tilde.assign(S + 1, 0.0);
  for (int s = 1; s <= S; ++s) {
    fs.eta_tilde[s] = s == 1 ? fs.eta[1]
                             : (1.0 - fs.gamma_bar[s - 1]) /
                                   (1.0 - fs.gamma_bar[s]) * fs.eta[s];
  }
}

void check_invariants(const FastSchedule& fs, int T) {
  for (int s = 1; s <= fs.steps; ++s) {
    if (!(fs.eta[s] > 0.0 && fs.eta[s] < 1.0)) {
      throw ConstructionError("eta_" + std::to_string(s) + " outside (0, 1)");
    }
    if (!(fs.r[s] < fs.r[s - 1] && fs.r[s] > 0.0)) {
      throw ConstructionError("noise levels not strictly decreasing at s = " +
                              std::to_string(s));
    }
    if (!(fs.t_cont[s] > fs.t_cont[s - 1] && fs.t_cont[s] <= T)) {
      throw ConstructionError(
          "continuous steps not strictly increasing within (0, T] at s = " +
          std::to_string(s));
    }
  }
}

std::vector<int> select_steps(int T, int S, Variant variant) {
  std::vector<int> tau(S + 1, 0);
  const std::int64_t TT = T;
  const std::int64_t SS = S;
  for (std::int64_t s = 1; s <= SS; ++s) {
    // Integer arithmetic keeps ⌊c s⌋ exact where c is not representable.
    tau[s] = variant == Variant::kLinear
                 ? static_cast<int>(TT * s / SS)
                 : static_cast<int>(4 * TT * s * s / (5 * SS * SS));
  }
  return tau;
}

double var_eta(Variant variant, double c, int s, double eta0) {
  const double f = 1.0 + c * s;
  return variant == Variant::kLinear ? f * eta0 : f * f * eta0;
}

}  // namespace

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kVarLinear: return "VAR_LINEAR";
    case ScheduleKind::kVarQuadratic: return "VAR_QUADRATIC";
    case ScheduleKind::kStepLinear: return "STEP_LINEAR";
    case ScheduleKind::kStepQuadratic: return "STEP_QUADRATIC";
  }
  return "?";
}

std::string_view to_string(Variant variant) {
  return variant == Variant::kLinear ? "linear" : "quadratic";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  for (auto kind : {ScheduleKind::kVarLinear, ScheduleKind::kVarQuadratic,
                    ScheduleKind::kStepLinear, ScheduleKind::kStepQuadratic}) {
    if (name == to_string(kind)) return kind;
  }
  throw ValidationError("unknown schedule kind '" + std::string(name) + "'");
}

Variant parse_variant(std::string_view name) {
  if (name == "linear") return Variant::kLinear;
  if (name == "quadratic") return Variant::kQuadratic;
  throw ValidationError("unknown schedule variant '" + std::string(name) + "'");
}

bool is_step_kind(ScheduleKind kind) {
  return kind == ScheduleKind::kStepLinear || kind == ScheduleKind::kStepQuadratic;
}

ScheduleKind make_kind(bool step, Variant variant) {
  if (step) {
    return variant == Variant::kLinear ? ScheduleKind::kStepLinear
                                       : ScheduleKind::kStepQuadratic;
  }
  return variant == Variant::kLinear ? ScheduleKind::kVarLinear
                                     : ScheduleKind::kVarQuadratic;
}

FastSchedule build_step_schedule(const NoiseLevelMap& map, int steps,
                                 Variant variant) {
  const VarianceSchedule& sched = map.schedule();
  const int T = sched.num_steps();
  if (steps < 1 || steps > T) {
    throw RangeError("STEP schedule length S = " + std::to_string(steps) +
                     " outside [1, T]");
  }

  FastSchedule fs;
  fs.kind = make_kind(true, variant);
  fs.source = sched.descriptor();
  fs.requested_steps = steps;
  fs.c = variant == Variant::kLinear
             ? double(T) / steps
             : 0.8 * double(T) / (double(steps) * double(steps));

  const std::vector<int> raw = select_steps(T, steps, variant);
  fs.tau.assign(1, 0);
  int clamped = 0;
  for (int s = 1; s <= steps; ++s) {
    int t = raw[s];
    if (t < 1) {
      t = 1;
      ++clamped;
    }
    if (t != fs.tau.back()) fs.tau.push_back(t);
  }
  fs.steps = int(fs.tau.size()) - 1;
  if (clamped > 0) {
    fs.warnings.push_back(std::to_string(clamped) +
                          " selected step(s) floored to 0 and were clamped to 1");
  }
  if (fs.steps < steps) {
    fs.warnings.push_back("duplicate steps removed; S reduced from " +
                          std::to_string(steps) + " to " +
                          std::to_string(fs.steps));
  }

  const int S = fs.steps;
  fs.eta.assign(S + 1, 0.0);
  fs.gamma.assign(S + 1, 0.0);
  fs.gamma_bar.assign(S + 1, 1.0);
  fs.r.assign(S + 1, 1.0);
  fs.t_cont.assign(S + 1, 0.0);
  for (int s = 1; s <= S; ++s) {
    // 1 − ᾱ_{τ_s} / ᾱ_{τ_{s−1}} summed in log space over the skipped steps;
    // a single step gives back beta exactly.
    double log_ratio = 0.0;
    for (int i = fs.tau[s - 1] + 1; i <= fs.tau[s]; ++i) {
      log_ratio += std::log1p(-sched.beta(i));
    }
    // gamma is kept alongside eta: when eta is close to 1, 1 − eta has lost
    // the low digits of the ratio.
    if (fs.tau[s] - fs.tau[s - 1] == 1) {
      fs.eta[s] = sched.beta(fs.tau[s]);
      fs.gamma[s] = sched.alpha(fs.tau[s]);
    } else {
      fs.eta[s] = -std::expm1(log_ratio);
      fs.gamma[s] = std::exp(log_ratio);
    }
    fs.gamma_bar[s] = sched.alpha_bar(fs.tau[s]);
    fs.r[s] = std::sqrt(fs.gamma_bar[s]);
    fs.t_cont[s] = fs.tau[s];
  }
  fill_derived(fs);
  check_invariants(fs, T);
  return fs;
}

FastSchedule build_var_schedule(const NoiseLevelMap& map, int steps,
                                Variant variant) {
  const VarianceSchedule& sched = map.schedule();
  const int T = sched.num_steps();
  if (steps < 1) {
    throw RangeError("VAR schedule length S must be >= 1");
  }
  const double eta0 = sched.beta_1();
  const double log_target = std::log(sched.alpha_bar(T));
  auto residual = [&](double c) {
    double log_product = 0.0;
    for (int s = 1; s <= steps; ++s) {
      log_product += std::log1p(-var_eta(variant, c, s, eta0));
    }
    return log_product - log_target;
  };

  // The largest eta is eta_S; keep it at or below kMaxEta.
  const double c_max =
      variant == Variant::kLinear
          ? (kMaxEta / eta0 - 1.0) / steps
          : (std::sqrt(kMaxEta / eta0) - 1.0) / steps;
  double lo = 0.0;
  double hi = c_max;
  double f_lo = residual(lo);
  double f_hi = residual(hi);
  if (!(f_lo > 0.0)) {
    throw ConstructionError(
        "no VAR root with c > 0: S = " + std::to_string(steps) +
        " steps of variance beta_1 already reach alpha_bar(T)");
  }
  if (!(f_hi < 0.0)) {
    throw ConstructionError(
        "no VAR root: with S = " + std::to_string(steps) +
        " steps the product of (1 - eta_s) cannot reach alpha_bar(T) while "
        "every eta_s stays below 1 - 1e-6");
  }

  // Residual is strictly decreasing in c.
  double c = 0.5 * (lo + hi);
  double f = residual(c);
  for (int iter = 0; iter < kMaxRootIterations && std::abs(f) > kRootTolerance;
       ++iter) {
    if (f > 0.0) {
      lo = c;
      f_lo = f;
    } else {
      hi = c;
      f_hi = f;
    }
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    c = mid;
    f = residual(c);
  }
  if (std::abs(f_lo) < std::abs(f)) {
    c = lo;
    f = f_lo;
  }
  if (std::abs(f_hi) < std::abs(f)) {
    c = hi;
    f = f_hi;
  }
  if (!(std::abs(f) <= kConstraintTolerance)) {
    throw ConstructionError("VAR root solve left residual " + std::to_string(f));
  }

  FastSchedule fs;
  fs.kind = make_kind(false, variant);
  fs.source = sched.descriptor();
  fs.steps = steps;
  fs.requested_steps = steps;
  fs.c = c;
  fs.eta.assign(steps + 1, 0.0);
  fs.gamma.assign(steps + 1, 0.0);
  fs.gamma_bar.assign(steps + 1, 1.0);
  fs.r.assign(steps + 1, 1.0);
  fs.t_cont.assign(steps + 1, 0.0);
  for (int s = 1; s <= steps; ++s) {
    fs.eta[s] = var_eta(variant, c, s, eta0);
    fs.gamma[s] = 1.0 - fs.eta[s];
    fs.gamma_bar[s] = fs.gamma_bar[s - 1] * fs.gamma[s];
    fs.r[s] = std::sqrt(fs.gamma_bar[s]);
    fs.t_cont[s] = map.step_of_noise_level(fs.r[s]);
  }
  fill_derived(fs);
  check_invariants(fs, T);
  return fs;
}

FastSchedule build_fast_schedule(const NoiseLevelMap& map, ScheduleKind kind,
                                 int steps) {
  const Variant variant =
      kind == ScheduleKind::kVarLinear || kind == ScheduleKind::kStepLinear
          ? Variant::kLinear
          : Variant::kQuadratic;
  return is_step_kind(kind) ? build_step_schedule(map, steps, variant)
                            : build_var_schedule(map, steps, variant);
}

bool step_as_var_equivalence(const FastSchedule& schedule) {
  if (!schedule.is_step()) {
    throw UsageError("STEP-as-VAR check called on a VAR schedule");
  }
  double product = 1.0;
  for (int s = 1; s <= schedule.steps; ++s) {
    if (!(std::abs(1.0 - schedule.eta[s] - schedule.gamma[s]) <= 1e-15)) {
      return false;
    }
    product *= schedule.gamma[s];
    const double expected = schedule.gamma_bar[s];
    if (!(std::abs(product - expected) <= 1e-12 * expected)) return false;
  }
  return true;
}

double constraint_residual(const FastSchedule& schedule,
                           const VarianceSchedule& variance) {
  double log_product = 0.0;
  for (int s = 1; s <= schedule.steps; ++s) {
    log_product += std::log1p(-schedule.eta[s]);
  }
  const int end = schedule.is_step() ? schedule.tau[schedule.steps]
                                     : variance.num_steps();
  return log_product - std::log(variance.alpha_bar(end));
}

}  // namespace fastdpm
