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

#include "fastdpm/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastdpm/error.hpp"
#include "fastdpm/special_functions.hpp"

namespace fastdpm {

VarianceSchedule::VarianceSchedule(double beta_1, double beta_T, int num_steps)
    : VarianceSchedule(ScheduleDescriptor{beta_1, beta_T, num_steps}) {}

VarianceSchedule::VarianceSchedule(const ScheduleDescriptor& descriptor)
    : descriptor_(descriptor) {
  const auto [b1, bT, T] = descriptor;
  if (T < 2) {
    throw ConstructionError("variance schedule needs T >= 2, got " +
                            std::to_string(T));
  }
  if (!(std::isfinite(b1) && std::isfinite(bT) && 0.0 < b1 && b1 < bT &&
        bT < 1.0)) {
    throw ConstructionError(
        "variance schedule needs 0 < beta_1 < beta_T < 1");
  }
  delta_beta_ = (bT - b1) / (T - 1);
  beta_hat_ = (1.0 - b1) / delta_beta_;
  if (!(beta_hat_ > T)) {
    throw ConstructionError(
        "beta_hat = (1 - beta_1) / delta_beta must exceed T for the Gamma "
        "extension; got beta_hat = " + std::to_string(beta_hat_));
  }

  beta_.assign(T + 1, 0.0);
  alpha_bar_.assign(T + 1, 1.0);
  beta_tilde_.assign(T + 1, 0.0);
  for (int t = 1; t <= T; ++t) {
    beta_[t] = b1 + (t - 1) * delta_beta_;
    alpha_bar_[t] = alpha_bar_[t - 1] * (1.0 - beta_[t]);
    beta_tilde_[t] = t == 1 ? beta_[1]
                            : (1.0 - alpha_bar_[t - 1]) /
                                  (1.0 - alpha_bar_[t]) * beta_[t];
  }
}

void VarianceSchedule::check_step(int t, int lo) const {
  if (t < lo || t > num_steps()) {
    throw RangeError("diffusion step " + std::to_string(t) +
                     " outside [" + std::to_string(lo) + ", " +
                     std::to_string(num_steps()) + "]");
  }
}

double VarianceSchedule::beta(int t) const {
  check_step(t, 1);
  return beta_[t];
}

double VarianceSchedule::alpha(int t) const { return 1.0 - beta(t); }

double VarianceSchedule::alpha_bar(int t) const {
  check_step(t, 0);
  return alpha_bar_[t];
}

double VarianceSchedule::beta_tilde(int t) const {
  check_step(t, 1);
  return beta_tilde_[t];
}

double alpha_bar_product(const VarianceSchedule& schedule, int t) {
  if (t < 1 || t > schedule.num_steps()) {
    throw RangeError("alpha_bar_product: t = " + std::to_string(t) +
                     " outside [1, T]");
  }
  double product = 1.0;
  for (int i = 1; i <= t; ++i) {
    product *= 1.0 - (schedule.beta_1() + (i - 1) * schedule.delta_beta());
  }
  return product;
}

NoiseLevelMap::NoiseLevelMap(VarianceSchedule schedule, double tolerance,
                             int max_iterations)
    : schedule_(std::move(schedule)),
      tolerance_(tolerance),
      max_iterations_(max_iterations) {
  if (!(tolerance_ > 0.0) || max_iterations_ < 1) {
    throw ConstructionError("noise level map needs tolerance > 0 and max_iterations >= 1");
  }
  log_alpha_bar_end_ = log_noise_level_stirling(schedule_.num_steps());
}

double NoiseLevelMap::log_alpha_bar(double t) const {
  if (!(t >= 0.0 && t <= schedule_.num_steps())) {
    throw RangeError("noise level requested outside [0, T]: t = " +
                     std::to_string(t));
  }
  // ᾱ(t) = Δβ^t Γ(β̂ + 1) / Γ(β̂ − t + 1)
  return t * std::log(schedule_.delta_beta()) +
         log_gamma_ratio(schedule_.beta_hat(), t);
}

double NoiseLevelMap::noise_level(double t) const {
  return std::exp(0.5 * log_alpha_bar(t));
}

double NoiseLevelMap::log_noise_level_stirling(double t) const {
  const double bh = schedule_.beta_hat();
  if (!(t >= 0.0)) {
    throw DomainError("Stirling noise level needs t >= 0");
  }
  if (!(t < bh)) {
    throw DomainError("Stirling noise level needs t < beta_hat");
  }
  const double w = bh - t;
  // t log Δβ + (β̂ + ½) log β̂ − (β̂ − t + ½) log(β̂ − t) − t
  //   + (1/β̂ − 1/(β̂ − t)) / 12, rearranged so no two large terms cancel.
  return t * std::log(schedule_.delta_beta() * w) -
         (bh + 0.5) * std::log1p(-t / bh) - t - t / (12.0 * bh * w);
}

NoiseLevelMap::Inversion NoiseLevelMap::invert(double r) const {
  const int T = schedule_.num_steps();
  if (!(r > 0.0 && r <= 1.0)) {
    throw RangeError("noise level must lie in (0, 1], got " + std::to_string(r));
  }
  if (r == 1.0) return {0.0, 0};
  const double target = 2.0 * std::log(r);
  if (target < log_alpha_bar_end_) {
    if (target >= log_alpha_bar_end_ - tolerance_) return {double(T), 0};
    throw RangeError("noise level " + std::to_string(r) + " is below R(T)");
  }

  // Largest t0 with alpha_bar(t0) >= r², so r lies in the unit bracket.
  const auto table = schedule_.alpha_bar_table();
  const double r2 = r * r;
  const auto first_below = std::partition_point(
      table.begin(), table.end(), [r2](double a) { return a >= r2; });
  int t0 = std::clamp(int(first_below - table.begin()) - 1, 0, T - 1);

  auto residual = [&](double t) { return log_noise_level_stirling(t) - target; };
  double lo = t0;
  double hi = t0 + 1;
  double f_lo = residual(lo);
  double f_hi = residual(hi);
  // The table and the continuous extension can disagree in the last ulp.
  while (f_lo < 0.0 && lo > 0.0) {
    hi = lo;
    f_hi = f_lo;
    lo -= 1.0;
    f_lo = residual(lo);
  }
  while (f_hi > 0.0 && hi < T) {
    lo = hi;
    f_lo = f_hi;
    hi += 1.0;
    f_hi = residual(hi);
  }
  if (f_lo == 0.0) return {lo, 0};
  if (f_hi == 0.0) return {hi, 0};

  // Bracketed search on the decreasing residual. Trial points come from
  // linear interpolation with the Illinois modification (w_lo, w_hi are the
  // down-weighted endpoint values); the bracket always contains the root.
  double w_lo = f_lo;
  double w_hi = f_hi;
  int last_side = 0;
  for (int iter = 1; iter <= max_iterations_; ++iter) {
    double t = (w_lo * hi - w_hi * lo) / (w_lo - w_hi);
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
    const double f = residual(t);
    if (std::abs(f) <= tolerance_) {
      // Near t = 0 the slope is ~1e-4, so a 1e-10 residual still leaves
      // ~1e-6 in t. One Newton step with the digamma derivative removes it.
      const double w = schedule_.beta_hat() - t;
      const double slope =
          std::log(schedule_.delta_beta() * w) + 0.5 / w - 1.0 / (12.0 * w * w);
      const double polished = t - f / slope;
      return {polished >= lo && polished <= hi ? polished : t, iter};
    }
    if (f > 0.0) {
      lo = t;
      f_lo = w_lo = f;
      if (last_side == 1) w_hi *= 0.5;
      last_side = 1;
    } else {
      hi = t;
      f_hi = w_hi = f;
      if (last_side == -1) w_lo *= 0.5;
      last_side = -1;
    }
  }
  throw ConvergenceError("noise level inversion did not converge for r = " +
                         std::to_string(r));
}

}  // namespace fastdpm
