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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fastdpm/error.hpp"
#include "fastdpm/experiment.hpp"
#include "fastdpm/serialization.hpp"

namespace fastdpm {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("fastdpm_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json sweep_config() {
  return Json::parse(R"({
    "schedule": {"beta_1": 1e-4, "beta_T": 0.02, "T": 200},
    "data": {"preset": "gaussian2d"},
    "model": {"type": "analytic"},
    "sweep": {
      "kinds": ["STEP", "VAR"],
      "variants": ["linear"],
      "S": [5, 10, 50],
      "samplers": ["ddpm_rev", "ddim_rev"],
      "kappas": [0.0],
      "seeds": [1, 2]
    },
    "samples_per_cell": 500
  })");
}

TEST(Serialization, ScheduleDescriptorRoundTrip) {
  const ScheduleDescriptor d{1e-4, 0.02, 1000};
  const ScheduleDescriptor back = schedule_descriptor_from_json(to_json(d));
  EXPECT_EQ(back.beta_1, d.beta_1);
  EXPECT_EQ(back.beta_T, d.beta_T);
  EXPECT_EQ(back.num_steps, d.num_steps);
}

TEST(Serialization, FastScheduleFields) {
  const NoiseLevelMap map(VarianceSchedule(1e-4, 0.02, 1000));
  const Json step = to_json(build_step_schedule(map, 10, Variant::kLinear));
  EXPECT_EQ(step.at("kind"), "STEP_LINEAR");
  EXPECT_EQ(step.at("S"), 10);
  EXPECT_EQ(step.at("tau").size(), 10u);
  EXPECT_EQ(step.at("tau")[0], 100);
  EXPECT_EQ(step.at("t_cont")[9], 1000.0);
  const Json var = to_json(build_var_schedule(map, 4, Variant::kQuadratic));
  EXPECT_FALSE(var.contains("tau"));
  EXPECT_EQ(var.at("eta").size(), 4u);
}

TEST(Serialization, MixtureRoundTrip) {
  const GaussianMixture gm = preset_mixture("gmm3");
  const GaussianMixture back = gaussian_mixture_from_json(to_json(gm));
  EXPECT_EQ(back.weights(), gm.weights());
  EXPECT_EQ(back.labels(), gm.labels());
  for (int k = 0; k < gm.num_components(); ++k) {
    EXPECT_EQ(back.means()[k], gm.means()[k]);
    EXPECT_EQ(back.covariances()[k], gm.covariances()[k]);
  }
  Json bad = to_json(gm);
  bad["weights"][0] = 0.9;
  EXPECT_THROW(gaussian_mixture_from_json(bad), ValidationError);
}

TEST(Serialization, SampleBatchBinaryRoundTrip) {
  TempDir dir;
  const NoiseLevelMap map(VarianceSchedule(1e-4, 0.02, 200));
  const FastSchedule fs = build_var_schedule(map, 5, Variant::kLinear);
  const ZeroEpsilonModel model(3);
  SamplerConfig cfg;
  cfg.batch = 7;
  cfg.seed = 42;
  SampleBatch batch = fastdpm_ddpm_rev(fs, model, cfg);
  batch.labels = {0, 1, 0, 1, 0, 1, 0};
  write_sample_batch(batch, dir.path() / "out");
  EXPECT_EQ(fs::file_size(dir.path() / "out.bin"), 7u * 3u * 8u);
  const SampleBatch back = read_sample_batch(dir.path() / "out");
  EXPECT_EQ(back.samples, batch.samples);
  EXPECT_EQ(back.labels, batch.labels);
  EXPECT_EQ(back.provenance.seed, 42u);
  EXPECT_EQ(back.provenance.sampler, SamplerKind::kFastDdpm);
  EXPECT_EQ(back.provenance.fast_kind, ScheduleKind::kVarLinear);
  EXPECT_EQ(back.provenance.steps, 5);
  EXPECT_EQ(back.model_calls, 35u);
}

TEST(Serialization, BinaryIsLittleEndianRowMajor) {
  TempDir dir;
  SampleBatch batch;
  batch.samples.resize(2, 2);
  batch.samples << 1.0, 2.0, 3.0, -0.5;
  write_sample_batch(batch, dir.path() / "b");
  const std::string bytes = slurp(dir.path() / "b.bin");
  ASSERT_EQ(bytes.size(), 32u);
  // 2.0 = 0x4000000000000000, second value in row-major order.
  EXPECT_EQ(static_cast<unsigned char>(bytes[15]), 0x40);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 0x00);
  // 3.0 = 0x4008000000000000.
  EXPECT_EQ(static_cast<unsigned char>(bytes[22]), 0x08);
}

TEST(Serialization, CsvRoundTrip) {
  Eigen::MatrixXd m(3, 2);
  m << 0.1, -2.5, 1e-300, 3.0, 1.0 / 3.0, 7.25;
  EXPECT_EQ(samples_from_csv(samples_to_csv(m)), m);
}

TEST(Serialization, RegressorRoundTrip) {
  TempDir dir;
  RandomStream rng(3);
  ToyRegressor model(2, {8, 4}, 200, rng);
  model.mutable_layers().back().bias << 0.25, -0.5;
  save_regressor(model, dir.path() / "net");
  const ToyRegressor back = load_regressor(dir.path() / "net");
  EXPECT_EQ(back.widths(), model.widths());
  EXPECT_EQ(back.num_steps(), 200);
  const Eigen::Vector2d x(0.3, -1.0);
  EXPECT_EQ(back.predict(x, 17.5), model.predict(x, 17.5));
}

TEST(ExperimentConfig, ParsesSweep) {
  const ExperimentConfig c = experiment_config_from_json(sweep_config());
  EXPECT_EQ(c.schedule.num_steps, 200);
  EXPECT_EQ(c.data_preset, "gaussian2d");
  EXPECT_EQ(c.steps.size(), 3u);
  EXPECT_EQ(c.samples_per_cell, 500);
  EXPECT_EQ(expand_cells(c).size(), 2u * 3u * 2u * 2u);
}

TEST(ExperimentConfig, RejectsInvalidInput) {
  for (const char* key : {"kinds", "variants", "S", "samplers", "seeds"}) {
    Json j = sweep_config();
    j["sweep"][key] = Json::array();
    EXPECT_THROW(experiment_config_from_json(j), ValidationError) << key;
  }
  Json j = sweep_config();
  j["sweep"]["S"] = {0};
  EXPECT_THROW(experiment_config_from_json(j), ValidationError);
  j = sweep_config();
  j["sweep"]["S"] = {201};
  EXPECT_THROW(experiment_config_from_json(j), ValidationError);
  j = sweep_config();
  j["sweep"]["kappas"] = {1.5};
  EXPECT_THROW(experiment_config_from_json(j), ValidationError);
  j = sweep_config();
  j["data"] = {{"preset", "unknown"}};
  EXPECT_THROW(experiment_config_from_json(j), ValidationError);
  j = sweep_config();
  j["schedule"]["beta_T"] = 2.0;
  EXPECT_THROW(experiment_config_from_json(j), Error);
  j = sweep_config();
  j.erase("sweep");
  EXPECT_THROW(experiment_config_from_json(j), ValidationError);
}

TEST(Sweep, TwelveRowsPerSeed) {
  const ExperimentConfig c = experiment_config_from_json(sweep_config());
  const SweepResult result = run_sweep(c);
  ASSERT_EQ(result.rows.size(), 24u);
  for (const SweepRow& row : result.rows) {
    EXPECT_TRUE(row.ok) << row.reason;
    EXPECT_TRUE(std::isfinite(row.metrics.frechet));
    EXPECT_GE(row.metrics.frechet, 0.0);
    EXPECT_EQ(row.model_calls_per_chain, std::uint64_t(row.effective_steps));
  }
}

TEST(Sweep, ByteIdenticalOutputs) {
  TempDir dir;
  const ExperimentConfig c = experiment_config_from_json(sweep_config());
  write_sweep(run_sweep(c), c, dir.path() / "a");
  write_sweep(run_sweep(c), c, dir.path() / "b");
  const std::string csv = slurp(dir.path() / "a" / "sweep.csv");
  EXPECT_EQ(csv, slurp(dir.path() / "b" / "sweep.csv"));
  EXPECT_EQ(slurp(dir.path() / "a" / "sweep.json"), slurp(dir.path() / "b" / "sweep.json"));
  EXPECT_EQ(csv.rfind("# fastdpm-sweep schema=1 config_hash=", 0), 0u);
  EXPECT_TRUE(fs::exists(dir.path() / "a" / "timings.json"));
}

TEST(Sweep, LabeledMixtureReportsAccuracy) {
  Json j = sweep_config();
  j["data"] = {{"preset", "gmm2"}};
  j["sweep"]["kinds"] = {"STEP"};
  j["sweep"]["S"] = {10};
  j["sweep"]["samplers"] = {"ddpm_rev"};
  j["sweep"]["seeds"] = {0};
  const SweepResult result = run_sweep(experiment_config_from_json(j));
  ASSERT_EQ(result.rows.size(), 1u);
  const SweepRow& row = result.rows[0];
  ASSERT_TRUE(row.metrics.accuracy.has_value());
  ASSERT_TRUE(row.metrics.inception_score.has_value());
  EXPECT_GT(*row.metrics.accuracy, 0.95);
  EXPECT_GT(*row.metrics.inception_score, 1.8);
  EXPECT_LE(*row.metrics.inception_score, 2.0 + 1e-9);
}

TEST(Sweep, FailedCellIsRecorded) {
  Json j = sweep_config();
  j["sweep"]["kinds"] = {"VAR"};
  j["sweep"]["S"] = {5, 100000};
  j["sweep"]["samplers"] = {"ddpm_rev"};
  j["sweep"]["seeds"] = {0};
  const SweepResult result = run_sweep(experiment_config_from_json(j));
  ASSERT_EQ(result.rows.size(), 2u);
  EXPECT_TRUE(result.rows[0].ok);
  EXPECT_FALSE(result.rows[1].ok);
  EXPECT_FALSE(result.rows[1].reason.empty());
  EXPECT_NE(sweep_to_csv(result).find("failed"), std::string::npos);
}

TEST(Inspect, StepLinearContinuousSteps) {
  const Json j = Json::parse(
      inspect_schedule({1e-4, 0.02, 1000}, ScheduleKind::kStepLinear, 10, true));
  for (int s = 0; s < 10; ++s) EXPECT_EQ(j.at("t_cont")[s], 100.0 * (s + 1));
  EXPECT_EQ(j.at("step_as_var"), true);
}

TEST(Inspect, VarLinearResidual) {
  const Json j =
      Json::parse(inspect_schedule({1e-4, 0.02, 200}, ScheduleKind::kVarLinear, 5, true));
  EXPECT_LE(std::abs(j.at("constraint_residual").get<double>()), 1e-10);
  EXPECT_TRUE(j.at("step_as_var").is_null());
  const std::string text =
      inspect_schedule({1e-4, 0.02, 200}, ScheduleKind::kVarLinear, 5, false);
  EXPECT_NE(text.find("constraint residual"), std::string::npos);
}

TEST(Inspect, RejectsZeroLength) {
  EXPECT_THROW(inspect_schedule({1e-4, 0.02, 200}, ScheduleKind::kStepLinear, 0, false),
               ValidationError);
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace fastdpm
