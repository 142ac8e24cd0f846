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
#include <random>

#include <Eigen/Core>

namespace fastdpm {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of the sub-stream `index` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Seedable random stream with a fixed, platform-independent output.
///
/// Bits come from std::mt19937_64, whose output sequence the standard pins
/// down. Uniforms take the top 53 bits; standard normals use the basic
/// Box–Muller transform, consuming two uniforms per pair of normals and
/// returning the cosine branch first. None of the implementation-defined
/// std:: distributions are used.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  /// Independent sub-stream for (seed, index), e.g. one per chain. The
  /// result does not depend on how many other sub-streams exist.
  static RandomStream split(std::uint64_t seed, std::uint64_t index);

  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal.
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index dim);

  /// Number of normal variates handed out so far.
  std::uint64_t normal_draws() const noexcept { return normal_draws_; }
  /// Number of uniform variates handed out so far (excluding those consumed
  /// internally by normal()).
  std::uint64_t uniform_draws() const noexcept { return uniform_draws_; }

 private:
  double next_unit();

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
  std::uint64_t normal_draws_ = 0;
  std::uint64_t uniform_draws_ = 0;
};

}  // namespace fastdpm
