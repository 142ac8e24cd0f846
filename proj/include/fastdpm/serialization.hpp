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

#include <filesystem>
#include <string>

#include "json.hpp"

#include "fastdpm/fast_schedule.hpp"
#include "fastdpm/gaussian_mixture.hpp"
#include "fastdpm/metrics.hpp"
#include "fastdpm/samplers.hpp"
#include "fastdpm/schedule.hpp"
#include "fastdpm/toy_regressor.hpp"

namespace fastdpm {

using Json = nlohmann::json;

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// {"beta_1": …, "beta_T": …, "T": …}
Json to_json(const ScheduleDescriptor& descriptor);
ScheduleDescriptor schedule_descriptor_from_json(const Json& j);

/// {"kind", "S", "eta", "r", "t_cont", "tau"?} plus the derived arrays,
/// the solved constant and any construction warnings. Arrays run over
/// s = 1..S.
Json to_json(const FastSchedule& schedule);

/// {"weights": [...], "means": [[...]], "covariances": [[[...]]], "labels": [...]?}
Json to_json(const GaussianMixture& mixture);
GaussianMixture gaussian_mixture_from_json(const Json& j);

Json to_json(const Provenance& provenance);
Provenance provenance_from_json(const Json& j);

Json to_json(const MetricReport& report);

/// Writes `<prefix>.bin` (rows × cols little-endian float64, row-major) and
/// `<prefix>.json` (shape and provenance).
void write_sample_batch(const SampleBatch& batch, const std::filesystem::path& prefix);
SampleBatch read_sample_batch(const std::filesystem::path& prefix);

/// One header line x0,x1,… then one row per sample, 17 significant digits.
std::string samples_to_csv(const Eigen::MatrixXd& samples);
Eigen::MatrixXd samples_from_csv(const std::string& text);

/// Writes `<prefix>.bin` (all weights then biases, layer by layer, weights
/// column-major, little-endian float64) and `<prefix>.json` (widths, T,
/// activation).
void save_regressor(const ToyRegressor& model, const std::filesystem::path& prefix);
ToyRegressor load_regressor(const std::filesystem::path& prefix);

}  // namespace fastdpm
