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
#include <random>

#include <gtest/gtest.h>

#include "fastdpm/error.hpp"
#include "fastdpm/schedule.hpp"

namespace fastdpm {
namespace {

const VarianceSchedule kImage(1e-4, 0.02, 1000);
const VarianceSchedule kAudio(1e-4, 0.02, 200);

TEST(VarianceSchedule, DerivedConstants) {
  EXPECT_DOUBLE_EQ(kImage.delta_beta(), (0.02 - 1e-4) / 999.0);
  EXPECT_DOUBLE_EQ(kImage.beta_hat(), (1.0 - 1e-4) / kImage.delta_beta());
  EXPECT_DOUBLE_EQ(kImage.beta(1), 1e-4);
  EXPECT_NEAR(kImage.beta(1000), 0.02, 1e-16);
  EXPECT_DOUBLE_EQ(kImage.beta_tilde(1), kImage.beta(1));
  EXPECT_EQ(kImage.alpha_bar(0), 1.0);
  EXPECT_NEAR(kAudio.beta_hat(), 9999.0, 1e-9);
}

TEST(VarianceSchedule, Invariants) {
  for (const auto* s : {&kImage, &kAudio}) {
    for (int t = 1; t <= s->num_steps(); ++t) {
      EXPECT_GT(s->beta(t), 0.0);
      EXPECT_LT(s->beta(t), 1.0);
      if (t > 1) EXPECT_GT(s->beta(t), s->beta(t - 1));
      EXPECT_LT(s->alpha_bar(t), s->alpha_bar(t - 1));
      EXPECT_GT(s->alpha_bar(t), 0.0);
      EXPECT_LE(s->beta_tilde(t), s->beta(t));
    }
  }
}

TEST(VarianceSchedule, RejectsInvalidTriples) {
  EXPECT_THROW(VarianceSchedule(0.02, 1e-4, 100), ConstructionError);
  EXPECT_THROW(VarianceSchedule(0.0, 0.02, 100), ConstructionError);
  EXPECT_THROW(VarianceSchedule(1e-4, 1.0, 100), ConstructionError);
  EXPECT_THROW(VarianceSchedule(1e-4, 0.02, 1), ConstructionError);
  // Δβ = 0.49/9, beta_hat = 0.5/Δβ ≈ 9.18 < T = 10.
  EXPECT_THROW(VarianceSchedule(0.5, 0.99, 10), ConstructionError);
}

TEST(AlphaBarProduct, Examples) {
  EXPECT_DOUBLE_EQ(alpha_bar_product(kImage, 1), 0.9999);
  const double db = (0.02 - 1e-4) / 999.0;
  EXPECT_NEAR(alpha_bar_product(kImage, 2), (1 - 1e-4) * (1 - (1e-4 + db)), 1e-16);
  const double last = alpha_bar_product(kAudio, 200);
  EXPECT_GT(last, 0.0);
  EXPECT_LT(last, alpha_bar_product(kAudio, 199));
  EXPECT_THROW(alpha_bar_product(kAudio, 0), RangeError);
  EXPECT_THROW(alpha_bar_product(kAudio, 201), RangeError);
}

TEST(NoiseLevelGamma, Examples) {
  const NoiseLevelMap map(kImage);
  EXPECT_EQ(map.noise_level(0.0), 1.0);
  const double direct = std::sqrt(alpha_bar_product(kImage, 50));
  EXPECT_NEAR(map.noise_level(50.0), direct, 1e-8 * direct);
  EXPECT_LT(map.noise_level(5.5), map.noise_level(5.0));
  EXPECT_GT(map.noise_level(5.5), map.noise_level(6.0));
  EXPECT_THROW(map.noise_level(-0.1), RangeError);
  EXPECT_THROW(map.noise_level(1000.5), RangeError);
}

TEST(NoiseLevelGamma, AgreesWithDirectProductAtEveryIntegerStep) {
  for (const auto* s : {&kImage, &kAudio}) {
    const NoiseLevelMap map(*s);
    double worst = 0.0;
    for (int t = 1; t <= s->num_steps(); ++t) {
      const double direct = std::sqrt(alpha_bar_product(*s, t));
      worst = std::max(worst, std::abs(map.noise_level(t) - direct) / direct);
    }
    EXPECT_LE(worst, 1e-8) << "T=" << s->num_steps();
  }
}

TEST(NoiseLevelGamma, StrictlyDecreasing) {
  const NoiseLevelMap map(kAudio);
  double previous = map.noise_level(0.0);
  for (int i = 1; i <= 4000; ++i) {
    const double r = map.noise_level(i * 0.05);
    ASSERT_LT(r, previous) << "t=" << i * 0.05;
    previous = r;
  }
}

TEST(StirlingNoiseLevel, MatchesMultiprecisionValues) {
  // 2 log R(t) at 60 digits.
  const NoiseLevelMap image(kImage);
  EXPECT_NEAR(image.log_noise_level_stirling(0.3), -0.000027909702106540661278, 1e-15);
  EXPECT_NEAR(image.log_noise_level_stirling(37.0), -0.01697139558743578689, 1e-14);
  EXPECT_NEAR(image.log_noise_level_stirling(1000.0), -10.117713542413086242, 1e-12);
  const NoiseLevelMap audio(kAudio);
  EXPECT_NEAR(audio.log_noise_level_stirling(5.5), -0.0017878576065429441624, 1e-15);
  EXPECT_NEAR(audio.log_noise_level_stirling(200.0), -2.0235698120361827783, 1e-13);
}

TEST(StirlingNoiseLevel, Examples) {
  const NoiseLevelMap image(kImage);
  EXPECT_NEAR(image.log_noise_level_stirling(100.0),
              2.0 * std::log(image.noise_level(100.0)), 1e-6);
  EXPECT_NEAR(image.log_noise_level_stirling(1.0), std::log(1.0 - 1e-4), 1e-12);
  const NoiseLevelMap audio(kAudio);
  EXPECT_NEAR(audio.log_noise_level_stirling(200.0),
              std::log(alpha_bar_product(kAudio, 200)), 1e-6);
  EXPECT_THROW(image.log_noise_level_stirling(kImage.beta_hat()), DomainError);
  EXPECT_THROW(image.log_noise_level_stirling(-1.0), DomainError);
}

TEST(StirlingNoiseLevel, AgreesWithLogGammaOnGrid) {
  for (const auto* s : {&kImage, &kAudio}) {
    const NoiseLevelMap map(*s);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double t = s->num_steps() * i / 999.0;
      worst = std::max(worst, std::abs(map.log_noise_level_stirling(t) -
                                       2.0 * std::log(map.noise_level(t))));
    }
    EXPECT_LE(worst, 1e-6);
  }
}

TEST(StepOfNoiseLevel, Examples) {
  const NoiseLevelMap map(kImage);
  EXPECT_NEAR(map.step_of_noise_level(map.noise_level(37.0)), 37.0, 1e-6);
  EXPECT_NEAR(map.step_of_noise_level(map.noise_level(5.5)), 5.5, 1e-6);
  EXPECT_EQ(map.step_of_noise_level(1.0), 0.0);
  EXPECT_THROW(map.step_of_noise_level(1.5), RangeError);
  EXPECT_THROW(map.step_of_noise_level(0.0), RangeError);
  EXPECT_THROW(map.step_of_noise_level(0.5 * map.noise_level(1000.0)), RangeError);
  EXPECT_NEAR(map.step_of_noise_level(map.noise_level(1000.0)), 1000.0, 1e-6);
}

TEST(StepOfNoiseLevel, RoundTripAndIterationBudget) {
  std::mt19937_64 gen(7);
  for (const auto* s : {&kImage, &kAudio}) {
    const NoiseLevelMap map(*s);
    std::uniform_real_distribution<double> dist(0.0, s->num_steps());
    int max_iters = 0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double t = dist(gen);
      const auto inv = map.invert(map.noise_level(t));
      worst = std::max(worst, std::abs(inv.step - t));
      max_iters = std::max(max_iters, inv.iterations);
      EXPECT_LE(std::abs(map.log_noise_level_stirling(inv.step) -
                         2.0 * std::log(map.noise_level(t))),
                1e-10);
    }
    EXPECT_LE(worst, 1e-6);
    EXPECT_LE(max_iters, 20);
  }
}

TEST(StepOfNoiseLevel, ReportsNonConvergence) {
  const NoiseLevelMap map(kImage, 1e-300, 1);
  EXPECT_THROW(map.step_of_noise_level(map.noise_level(12.345)), ConvergenceError);
}

}  // namespace
}  // namespace fastdpm
