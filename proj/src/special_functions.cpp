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

#include "fastdpm/special_functions.hpp"

#include <array>
#include <cmath>

#include "fastdpm/error.hpp"

namespace fastdpm {
namespace {

constexpr double kAsymptoticThreshold = 15.0;

// B_{2k} / (2k (2k − 1)) for k = 1..5.
constexpr std::array<double, 5> kStirlingCoefficients = {
    1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0};

// Σ_k c_k (z^{1−2k} − w^{1−2k}).
double stirling_tail_difference(double z, double w) {
  double sum = 0.0;
  const double inv_z = 1.0 / z;
  const double inv_w = 1.0 / w;
  const double inv_z2 = inv_z * inv_z;
  const double inv_w2 = inv_w * inv_w;
  double pz = inv_z;
  double pw = inv_w;
  for (double c : kStirlingCoefficients) {
    sum += c * (pz - pw);
    pz *= inv_z2;
    pw *= inv_w2;
  }
  return sum;
}

}  // namespace

double log_gamma_ratio(double z, double t) {
  const double w = z - t;
  if (!(w > -1.0)) {
    throw DomainError("log_gamma_ratio: z + 1 - t must be positive");
  }
  if (t == 0.0) return 0.0;
  if (z < kAsymptoticThreshold || w < kAsymptoticThreshold) {
    return std::lgamma(z + 1.0) - std::lgamma(w + 1.0);
  }
  // log Γ(z+1) = (z + ½) log z − z + ½ log 2π + Σ c_k z^{1−2k}, so
  // the difference is t log z − t − (w + ½) log(w / z) + tails.
  return t * std::log(z) - t - (w + 0.5) * std::log1p(-t / z) +
         stirling_tail_difference(z, w);
}

}  // namespace fastdpm
