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

#include <cmath>

#include <gtest/gtest.h>

#include "fastdpm/error.hpp"
#include "fastdpm/special_functions.hpp"

namespace fastdpm {
namespace {

// Reference values from 60-digit multiprecision log-Gamma evaluations at the
// exact binary arguments.
struct RatioCase {
  double z;
  double t;
  double expected;
};

TEST(LogGammaRatio, MatchesMultiprecisionLargeArgument) {
  const RatioCase cases[] = {
      {50195.98492462312, 0.3, 3.2471091880679665},
      {50195.98492462312, 1.0, 10.823690320899910529},
      {50195.98492462312, 5.5, 59.530050223101025769},
      {50195.98492462312, 37.0, 400.46327066272158739},
      {50195.98492462312, 1000.0, 10813.672612357830783},
      {9999.0, 0.3, 2.7630826110728420435},
      {9999.0, 100.0, 920.52733689518070651},
      {9999.0, 200.0, 1840.0445045832003549},
  };
  for (const auto& c : cases) {
    EXPECT_NEAR(log_gamma_ratio(c.z, c.t), c.expected, 4e-16 * c.expected + 1e-15)
        << "z=" << c.z << " t=" << c.t;
  }
}

TEST(LogGammaRatio, SmallArgumentsUseLgamma) {
  EXPECT_NEAR(log_gamma_ratio(3.5, 1.25), 1.5179346397337168622, 1e-14);
  EXPECT_NEAR(log_gamma_ratio(12.0, 7.5), 16.029400528043169856, 1e-13);
  EXPECT_NEAR(log_gamma_ratio(20.0, 0.5), 1.5041154862226869199, 1e-14);
}

TEST(LogGammaRatio, IntegerShiftIsLogOfFallingProduct) {
  // Γ(z+1)/Γ(z+1−n) = z (z−1) ⋯ (z−n+1)
  const double z = 123.25;
  double log_product = 0.0;
  for (int i = 0; i < 40; ++i) log_product += std::log(z - i);
  EXPECT_NEAR(log_gamma_ratio(z, 40.0), log_product, 1e-12);
}

TEST(LogGammaRatio, ZeroShiftAndDomain) {
  EXPECT_EQ(log_gamma_ratio(5e4, 0.0), 0.0);
  EXPECT_THROW(log_gamma_ratio(3.0, 4.5), DomainError);
}

}  // namespace
}  // namespace fastdpm
