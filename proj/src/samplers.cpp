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

#include "fastdpm/samplers.hpp"

#include <cmath>
#include <string>

#include "fastdpm/error.hpp"
#include "parallel.hpp"

namespace fastdpm {
namespace {

constexpr double kRadicandSlack = 1e-12;

void check_config(const SamplerConfig& config, const EpsilonModel& model) {
  if (!(config.kappa >= 0.0 && config.kappa <= 1.0)) {
    throw ValidationError("kappa must lie in [0, 1]");
  }
  if (config.batch < 1) throw ValidationError("batch must be >= 1");
  if (model.dimension() < 1) throw ValidationError("model dimension must be >= 1");
}

// Runs config.batch independent chains of `steps` reverse updates.
// update(x, k, rng) applies the k-th update (k = steps..1) in place and
// returns the number of model calls it made.
template <typename Update>
SampleBatch run_chains(int steps, Eigen::Index dim, const SamplerConfig& config,
                       Update&& update) {
  const auto batch = std::size_t(config.batch);
  SampleBatch out;
  out.samples.resize(config.batch, dim);
  if (config.record_trace) {
    out.step_trace.assign(steps + 1, Eigen::MatrixXd(config.batch, dim));
  }
  std::vector<std::uint64_t> calls(batch, 0);
  std::vector<std::uint64_t> draws(batch, 0);

  detail::parallel_for(batch, config.threads, [&](std::size_t chain) {
    RandomStream rng = RandomStream::split(config.seed, chain);
    Eigen::VectorXd x = rng.normal_vector(dim);
    const auto row = Eigen::Index(chain);
    if (config.record_trace) out.step_trace[0].row(row) = x.transpose();
    for (int k = steps; k >= 1; --k) {
      calls[chain] += update(x, k, rng);
      if (!x.allFinite()) {
        throw NumericError("non-finite state in reverse chain", k);
      }
      if (config.record_trace) {
        out.step_trace[steps - k + 1].row(row) = x.transpose();
      }
    }
    out.samples.row(row) = x.transpose();
    draws[chain] = rng.normal_draws();
  });

  for (std::size_t i = 0; i < batch; ++i) {
    out.model_calls += calls[i];
    out.normal_draws += draws[i];
  }
  return out;
}

bool inject_noise(int step, FinalStepNoise mode) {
  return step > 1 || mode == FinalStepNoise::kLiteral;
}

Provenance make_provenance(const ScheduleDescriptor& schedule, SamplerKind kind,
                           std::optional<ScheduleKind> fast_kind, int steps,
                           const SamplerConfig& config) {
  return Provenance{schedule,    kind,        fast_kind,
                    steps,       config.kappa, config.seed,
                    config.final_step_noise};
}

}  // namespace

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kDdpmFull: return "ddpm_full";
    case SamplerKind::kFastDdpm: return "ddpm_rev";
    case SamplerKind::kFastDdim: return "ddim_rev";
  }
  return "?";
}

std::string_view to_string(FinalStepNoise mode) {
  return mode == FinalStepNoise::kZero ? "zero" : "literal";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  for (auto kind : {SamplerKind::kDdpmFull, SamplerKind::kFastDdpm,
                    SamplerKind::kFastDdim}) {
    if (name == to_string(kind)) return kind;
  }
  throw ValidationError("unknown sampler '" + std::string(name) + "'");
}

FinalStepNoise parse_final_step_noise(std::string_view name) {
  if (name == "zero") return FinalStepNoise::kZero;
  if (name == "literal") return FinalStepNoise::kLiteral;
  throw ValidationError("unknown final step noise mode '" + std::string(name) + "'");
}

Eigen::VectorXd forward_jump(const VarianceSchedule& schedule,
                             const Eigen::VectorXd& x0, int t,
                             RandomStream& rng) {
  if (t < 1 || t > schedule.num_steps()) {
    throw RangeError("forward_jump: t = " + std::to_string(t) + " outside [1, T]");
  }
  const double a = schedule.alpha_bar(t);
  return std::sqrt(a) * x0 + std::sqrt(1.0 - a) * rng.normal_vector(x0.size());
}

Eigen::VectorXd forward_step(const VarianceSchedule& schedule,
                             const Eigen::VectorXd& x_prev, int t,
                             RandomStream& rng) {
  const double b = schedule.beta(t);
  return std::sqrt(1.0 - b) * x_prev + std::sqrt(b) * rng.normal_vector(x_prev.size());
}

SampleBatch ddpm_full_reverse(const VarianceSchedule& schedule,
                              const EpsilonModel& model,
                              const SamplerConfig& config) {
  check_config(config, model);
  const int T = schedule.num_steps();
  const Eigen::Index dim = model.dimension();
  SampleBatch out = run_chains(
      T, dim, config, [&](Eigen::VectorXd& x, int t, RandomStream& rng) {
        const double b = schedule.beta(t);
        const double eps_scale = b / std::sqrt(1.0 - schedule.alpha_bar(t));
        x = (x - eps_scale * model.predict(x, t)) / std::sqrt(1.0 - b);
        if (inject_noise(t, config.final_step_noise)) {
          x += std::sqrt(schedule.beta_tilde(t)) * rng.normal_vector(dim);
        }
        return 1;
      });
  out.provenance = make_provenance(schedule.descriptor(), SamplerKind::kDdpmFull,
                                   std::nullopt, T, config);
  return out;
}

SampleBatch fastdpm_ddpm_rev(const FastSchedule& fs, const EpsilonModel& model,
                             const SamplerConfig& config) {
  check_config(config, model);
  const Eigen::Index dim = model.dimension();
  SampleBatch out = run_chains(
      fs.steps, dim, config, [&](Eigen::VectorXd& x, int s, RandomStream& rng) {
        const double eps_scale = fs.eta[s] / std::sqrt(1.0 - fs.gamma_bar[s]);
        x = (x - eps_scale * model.predict(x, fs.t_cont[s])) /
            std::sqrt(fs.gamma[s]);
        if (inject_noise(s, config.final_step_noise)) {
          x += std::sqrt(fs.eta_tilde[s]) * rng.normal_vector(dim);
        }
        return 1;
      });
  out.provenance = make_provenance(fs.source, SamplerKind::kFastDdpm, fs.kind,
                                   fs.steps, config);
  return out;
}

SampleBatch fastdpm_ddim_rev(const FastSchedule& fs, const EpsilonModel& model,
                             const SamplerConfig& config) {
  check_config(config, model);
  const double kappa = config.kappa;
  // sqrt(1 − gamma_bar_{s−1} − kappa² eta_tilde_s) for each s. At s = 1,
  // gamma_bar_0 = 1 makes the radicand −kappa² eta_tilde_1, which is
  // clamped to 0.
  std::vector<double> direction(fs.steps + 1, 0.0);
  for (int s = 1; s <= fs.steps; ++s) {
    const double radicand =
        1.0 - fs.gamma_bar[s - 1] - kappa * kappa * fs.eta_tilde[s];
    if (s > 1 && radicand < -kRadicandSlack) {
      throw ConstructionError("negative DDIM radicand " + std::to_string(radicand) +
                              " at s = " + std::to_string(s));
    }
    direction[s] = std::sqrt(std::max(radicand, 0.0));
  }

  const Eigen::Index dim = model.dimension();
  SampleBatch out = run_chains(
      fs.steps, dim, config, [&](Eigen::VectorXd& x, int s, RandomStream& rng) {
        const Eigen::VectorXd eps = model.predict(x, fs.t_cont[s]);
        const Eigen::VectorXd x0 =
            (x - std::sqrt(1.0 - fs.gamma_bar[s]) * eps) / std::sqrt(fs.gamma_bar[s]);
        x = std::sqrt(fs.gamma_bar[s - 1]) * x0 + direction[s] * eps;
        if (kappa > 0.0 && inject_noise(s, config.final_step_noise)) {
          x += kappa * std::sqrt(fs.eta_tilde[s]) * rng.normal_vector(dim);
        }
        return 1;
      });
  out.provenance = make_provenance(fs.source, SamplerKind::kFastDdim, fs.kind,
                                   fs.steps, config);
  return out;
}

}  // namespace fastdpm
