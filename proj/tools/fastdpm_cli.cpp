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

// Command-line front end: inspect schedules, draw samples, evaluate sample
// files, train the toy regressor and run experiment sweeps.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fastdpm/analytic_epsilon.hpp"
#include "fastdpm/error.hpp"
#include "fastdpm/experiment.hpp"
#include "fastdpm/fast_schedule.hpp"
#include "fastdpm/samplers.hpp"
#include "fastdpm/serialization.hpp"
#include "fastdpm/toy_regressor.hpp"

namespace fs = std::filesystem;
using namespace fastdpm;

namespace {

constexpr const char* kOutputEnv = "FASTDPM_OUT";

struct ScheduleOptions {
  std::string config;
  double beta_1 = 1e-4;
  double beta_T = 0.02;
  int T = 1000;

  void add(CLI::App* app) {
    app->add_option("--config", config, "JSON schedule descriptor {beta_1, beta_T, T}");
    app->add_option("--beta-1", beta_1, "first variance");
    app->add_option("--beta-T", beta_T, "last variance");
    app->add_option("--T", T, "number of diffusion steps");
  }

  ScheduleDescriptor descriptor() const {
    if (!config.empty()) return schedule_descriptor_from_json(read_json_file(config));
    return {beta_1, beta_T, T};
  }
};

struct DataOptions {
  std::string preset = "gaussian2d";
  std::string data;

  void add(CLI::App* app) {
    app->add_option("--preset", preset, "built-in mixture: gaussian2d, gmm2, gmm3");
    app->add_option("--data", data, "mixture JSON {weights, means, covariances, labels}");
  }

  GaussianMixture mixture() const {
    if (!data.empty()) return gaussian_mixture_from_json(read_json_file(data));
    return preset_mixture(preset);
  }
};

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
  return "fastdpm_out";
}

ScheduleKind kind_from_flags(const std::string& kind, const std::string& variant) {
  if (kind != "step" && kind != "var") {
    throw ValidationError("--kind must be 'step' or 'var'");
  }
  return make_kind(kind == "step", parse_variant(variant));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FastDPM: accelerated sampling for diffusion models, at desk scale"};
  app.require_subcommand(1);

  // inspect
  auto* inspect = app.add_subcommand("inspect", "print an S-step FastDPM schedule");
  ScheduleOptions inspect_schedule_opts;
  inspect_schedule_opts.add(inspect);
  std::string inspect_kind = "step";
  std::string inspect_variant = "linear";
  int inspect_steps = 10;
  bool inspect_json = false;
  inspect->add_option("--kind", inspect_kind, "step or var");
  inspect->add_option("--variant", inspect_variant, "linear or quadratic");
  inspect->add_option("--S", inspect_steps, "schedule length");
  inspect->add_flag("--json", inspect_json, "machine-readable output");

  // sample
  auto* sample = app.add_subcommand("sample", "draw a sample batch");
  ScheduleOptions sample_schedule_opts;
  sample_schedule_opts.add(sample);
  DataOptions sample_data;
  sample_data.add(sample);
  std::string sample_model;
  std::string sampler_name = "ddpm_rev";
  std::string sample_kind = "step";
  std::string sample_variant = "linear";
  std::string final_noise = "zero";
  std::string sample_out;
  std::optional<int> sample_label;
  int sample_steps = 10;
  int sample_count = 1000;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  bool write_csv = false;
  sample->add_option("--model", sample_model, "trained regressor prefix (default: analytic)");
  sample->add_option("--sampler", sampler_name, "ddpm_full, ddpm_rev or ddim_rev");
  sample->add_option("--kind", sample_kind, "step or var");
  sample->add_option("--variant", sample_variant, "linear or quadratic");
  sample->add_option("--S", sample_steps, "FastDPM length");
  sample->add_option("--kappa", kappa, "DDIM-rev noise scale in [0, 1]");
  sample->add_option("--n", sample_count, "number of chains");
  sample->add_option("--seed", seed, "RNG seed");
  sample->add_option("--final-noise", final_noise, "zero or literal");
  sample->add_option("--label", sample_label, "class label for conditional sampling");
  sample->add_option("--out", sample_out, "output directory");
  sample->add_flag("--csv", write_csv, "also write samples.csv");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "compute metrics for a sample batch");
  DataOptions eval_data;
  eval_data.add(evaluate);
  std::string samples_prefix;
  evaluate->add_option("--samples", samples_prefix, "prefix of <prefix>.bin/.json")->required();

  // train
  auto* train = app.add_subcommand("train", "fit the toy regressor to a mixture");
  ScheduleOptions train_schedule_opts;
  train_schedule_opts.add(train);
  DataOptions train_data;
  train_data.add(train);
  RegressorHyperparams hyper;
  std::string train_out;
  train->add_option("--iterations", hyper.iterations, "SGD iterations");
  train->add_option("--batch", hyper.batch, "minibatch size");
  train->add_option("--lr", hyper.learning_rate, "learning rate");
  train->add_option("--seed", hyper.seed, "RNG seed");
  train->add_flag("--discrete-t", "train on integer steps 1..T");
  train->add_option("--out", train_out, "output directory");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run an experiment grid");
  std::string sweep_config;
  std::string sweep_out;
  sweep->add_option("--config", sweep_config, "experiment JSON")->required();
  sweep->add_option("--out", sweep_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*inspect) {
      std::cout << inspect_schedule(inspect_schedule_opts.descriptor(),
                                    kind_from_flags(inspect_kind, inspect_variant),
                                    inspect_steps, inspect_json);
    } else if (*sample) {
      const ScheduleDescriptor descriptor = sample_schedule_opts.descriptor();
      const NoiseLevelMap map{VarianceSchedule(descriptor)};
      GaussianMixture mixture = sample_data.mixture();
      if (sample_label) mixture = mixture.restricted_to_label(*sample_label);
      std::unique_ptr<EpsilonModel> model;
      if (sample_model.empty()) {
        model = std::make_unique<AnalyticEpsilonModel>(mixture, map);
      } else {
        if (sample_label) throw ValidationError("--label needs the analytic model");
        model = std::make_unique<ToyRegressor>(load_regressor(sample_model));
      }
      SamplerConfig config;
      config.kappa = kappa;
      config.seed = seed;
      config.batch = sample_count;
      config.final_step_noise = parse_final_step_noise(final_noise);
      const SamplerKind kind = parse_sampler_kind(sampler_name);
      SampleBatch batch;
      if (kind == SamplerKind::kDdpmFull) {
        batch = ddpm_full_reverse(map.schedule(), *model, config);
      } else {
        const FastSchedule schedule = build_fast_schedule(
            map, kind_from_flags(sample_kind, sample_variant), sample_steps);
        for (const auto& w : schedule.warnings) std::cerr << "warning: " << w << '\n';
        batch = kind == SamplerKind::kFastDdpm ? fastdpm_ddpm_rev(schedule, *model, config)
                                               : fastdpm_ddim_rev(schedule, *model, config);
      }
      if (sample_label) batch.labels.assign(std::size_t(sample_count), *sample_label);
      const fs::path dir = output_dir(sample_out);
      fs::create_directories(dir);
      write_sample_batch(batch, dir / "samples");
      if (write_csv) write_text_file(dir / "samples.csv", samples_to_csv(batch.samples));
      std::cout << "wrote " << batch.samples.rows() << " samples to "
                << (dir / "samples").string() << ".{bin,json}\n"
                << "model calls per chain: " << batch.model_calls / std::uint64_t(sample_count)
                << '\n';
    } else if (*evaluate) {
      const SampleBatch batch = read_sample_batch(samples_prefix);
      const MetricReport report =
          evaluate_samples(batch.samples, eval_data.mixture(), batch.labels);
      std::cout << to_json(report).dump(2) << '\n';
    } else if (*train) {
      hyper.continuous_t = train->count("--discrete-t") == 0;
      const NoiseLevelMap map{VarianceSchedule(train_schedule_opts.descriptor())};
      const TrainingResult result = train_toy_regressor(train_data.mixture(), map, hyper);
      const fs::path dir = output_dir(train_out);
      fs::create_directories(dir);
      save_regressor(result.model, dir / "regressor");
      const Json log{{"initial_heldout", result.initial_heldout},
                     {"final_heldout", result.final_heldout},
                     {"loss_trace", result.loss_trace}};
      write_text_file(dir / "training.json", log.dump(2) + "\n");
      std::cout << "held-out objective " << result.initial_heldout << " -> "
                << result.final_heldout << "\nwrote " << (dir / "regressor").string()
                << ".{bin,json}\n";
    } else if (*sweep) {
      const ExperimentConfig config =
          experiment_config_from_json(read_json_file(sweep_config));
      const SweepResult result = run_sweep(config);
      const fs::path dir = output_dir(sweep_out);
      write_sweep(result, config, dir);
      std::size_t failed = 0;
      for (const auto& row : result.rows) failed += !row.ok;
      std::cout << "wrote " << result.rows.size() << " rows (" << failed << " failed) to "
                << (dir / "sweep.csv").string() << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
