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

#include "fastdpm/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fastdpm/analytic_epsilon.hpp"
#include "fastdpm/error.hpp"
#include "fastdpm/toy_regressor.hpp"
#include "parallel.hpp"

namespace fastdpm {
namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const Json& sweep, const char* key, Parse parse) {
  if (!sweep.contains(key)) {
    throw ValidationError(std::string("sweep is missing '") + key + "'");
  }
  const Json& list = sweep.at(key);
  if (!list.is_array() || list.empty()) {
    throw ValidationError(std::string("sweep list '") + key + "' must be a non-empty array");
  }
  std::vector<T> out;
  for (const auto& item : list) out.push_back(parse(item));
  return out;
}

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

std::string csv_safe(std::string text) {
  for (char& ch : text) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  }
  return text;
}

std::string hex64(std::uint64_t v) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(v));
  return buffer;
}

std::string kind_family(ScheduleKind kind) { return is_step_kind(kind) ? "STEP" : "VAR"; }

Variant kind_variant(ScheduleKind kind) {
  return kind == ScheduleKind::kStepLinear || kind == ScheduleKind::kVarLinear
             ? Variant::kLinear
             : Variant::kQuadratic;
}

SampleBatch run_sampler(const FastSchedule& fs, const EpsilonModel& model,
                        SamplerKind kind, const SamplerConfig& config) {
  switch (kind) {
    case SamplerKind::kFastDdpm: return fastdpm_ddpm_rev(fs, model, config);
    case SamplerKind::kFastDdim: return fastdpm_ddim_rev(fs, model, config);
    case SamplerKind::kDdpmFull: break;
  }
  throw ValidationError("sweeps run FastDPM samplers only");
}

// Class-conditional generation when the analytic model can be restricted to
// a label; unconditional otherwise.
SampleBatch generate_cell(const ExperimentConfig& config, const SweepCell& cell,
                          const FastSchedule& fs, const GaussianMixture& mixture,
                          const NoiseLevelMap& map, const EpsilonModel* trained) {
  SamplerConfig sampler_config;
  sampler_config.kappa = cell.kappa.value_or(0.0);
  sampler_config.final_step_noise = config.final_step_noise;
  sampler_config.threads = 1;
  const std::uint64_t cell_seed = derive_seed(cell.seed, cell.index);

  if (trained != nullptr || !mixture.labeled()) {
    sampler_config.seed = cell_seed;
    sampler_config.batch = config.samples_per_cell;
    if (trained != nullptr) return run_sampler(fs, *trained, cell.sampler, sampler_config);
    return run_sampler(fs, AnalyticEpsilonModel(mixture, map), cell.sampler, sampler_config);
  }

  // Chains per label in proportion to label weight, by cumulative rounding.
  const int labels = mixture.num_labels();
  std::vector<double> label_weight(labels, 0.0);
  for (int k = 0; k < mixture.num_components(); ++k) {
    label_weight[mixture.labels()[k]] += mixture.weights()[k];
  }
  SampleBatch pooled;
  pooled.samples.resize(config.samples_per_cell, mixture.dimension());
  double cumulative = 0.0;
  int assigned = 0;
  for (int label = 0; label < labels; ++label) {
    cumulative += label_weight[label];
    const int upto = label + 1 == labels
                         ? config.samples_per_cell
                         : int(std::lround(cumulative * config.samples_per_cell));
    const int count = upto - assigned;
    if (count <= 0 || label_weight[label] == 0.0) continue;
    sampler_config.seed = derive_seed(cell_seed, std::uint64_t(label));
    sampler_config.batch = count;
    const AnalyticEpsilonModel model(mixture.restricted_to_label(label), map);
    SampleBatch part = run_sampler(fs, model, cell.sampler, sampler_config);
    pooled.samples.middleRows(assigned, count) = part.samples;
    pooled.labels.insert(pooled.labels.end(), std::size_t(count), label);
    pooled.model_calls += part.model_calls;
    pooled.normal_draws += part.normal_draws;
    pooled.provenance = part.provenance;
    pooled.provenance.seed = cell_seed;
    assigned = upto;
  }
  return pooled;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  ExperimentConfig config;
  config.source = j;
  try {
    config.schedule = schedule_descriptor_from_json(j.at("schedule"));
    const VarianceSchedule check(config.schedule);  // throws on invalid triples
    (void)check;

    const Json& data = j.at("data");
    if (data.contains("preset") == data.contains("path")) {
      throw ValidationError("data needs exactly one of 'preset' or 'path'");
    }
    if (data.contains("preset")) config.data_preset = data.at("preset").get<std::string>();
    else config.data_path = data.at("path").get<std::string>();

    const Json& model = j.value("model", Json{{"type", "analytic"}});
    const std::string type = model.at("type").get<std::string>();
    if (type == "analytic") {
      config.model.type = ModelChoice::Type::kAnalytic;
    } else if (type == "trained") {
      config.model.type = ModelChoice::Type::kTrained;
      config.model.path = model.at("path").get<std::string>();
    } else {
      throw ValidationError("model type must be 'analytic' or 'trained'");
    }

    const Json& sweep = j.at("sweep");
    config.step_kinds = parse_list<bool>(sweep, "kinds", [](const Json& v) {
      const auto name = v.get<std::string>();
      if (name == "STEP") return true;
      if (name == "VAR") return false;
      throw ValidationError("sweep kind must be STEP or VAR, got '" + name + "'");
    });
    config.variants = parse_list<Variant>(
        sweep, "variants", [](const Json& v) { return parse_variant(v.get<std::string>()); });
    config.steps = parse_list<int>(sweep, "S", [](const Json& v) { return v.get<int>(); });
    config.samplers = parse_list<SamplerKind>(sweep, "samplers", [](const Json& v) {
      const SamplerKind kind = parse_sampler_kind(v.get<std::string>());
      if (kind == SamplerKind::kDdpmFull) {
        throw ValidationError("sweep samplers must be ddpm_rev or ddim_rev");
      }
      return kind;
    });
    config.seeds = parse_list<std::uint64_t>(
        sweep, "seeds", [](const Json& v) { return v.get<std::uint64_t>(); });
    const bool has_ddim = std::find(config.samplers.begin(), config.samplers.end(),
                                    SamplerKind::kFastDdim) != config.samplers.end();
    if (sweep.contains("kappas") || has_ddim) {
      config.kappas = parse_list<double>(sweep, "kappas",
                                         [](const Json& v) { return v.get<double>(); });
    }
    config.samples_per_cell = j.value("samples_per_cell", config.samples_per_cell);
    config.final_step_noise =
        parse_final_step_noise(j.value("final_step_noise", std::string("zero")));
    config.threads = j.value("threads", 0);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("bad experiment config: ") + e.what());
  } catch (const ConstructionError& e) {
    throw ValidationError(std::string("bad experiment schedule: ") + e.what());
  }

  for (int S : config.steps) {
    if (S < 1) throw ValidationError("sweep S values must be >= 1");
    const bool any_step =
        std::find(config.step_kinds.begin(), config.step_kinds.end(), true) !=
        config.step_kinds.end();
    if (any_step && S > config.schedule.num_steps) {
      throw ValidationError("STEP schedules need S <= T, got S = " + std::to_string(S));
    }
  }
  for (double kappa : config.kappas) {
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw ValidationError("kappa must lie in [0, 1]");
  }
  if (config.threads < 0) throw ValidationError("threads must be >= 0");

  const GaussianMixture mixture = load_mixture(config);
  if (config.samples_per_cell < mixture.dimension() + 1) {
    throw ValidationError("samples_per_cell must be at least d + 1");
  }
  if (config.model.type == ModelChoice::Type::kTrained) {
    const ToyRegressor model = load_regressor(config.model.path);
    if (model.dimension() != mixture.dimension()) {
      throw ValidationError("trained model dimension does not match the data");
    }
    if (model.num_steps() != config.schedule.num_steps) {
      throw ValidationError("trained model was fit for a different T");
    }
  }
  return config;
}

GaussianMixture load_mixture(const ExperimentConfig& config) {
  if (!config.data_preset.empty()) return preset_mixture(config.data_preset);
  return gaussian_mixture_from_json(read_json_file(config.data_path));
}

std::vector<SweepCell> expand_cells(const ExperimentConfig& config) {
  std::vector<SweepCell> cells;
  for (bool step : config.step_kinds) {
    for (Variant variant : config.variants) {
      for (int S : config.steps) {
        for (SamplerKind sampler : config.samplers) {
          std::vector<std::optional<double>> kappas;
          if (sampler == SamplerKind::kFastDdim) {
            kappas.assign(config.kappas.begin(), config.kappas.end());
          } else {
            kappas.push_back(std::nullopt);
          }
          for (const auto& kappa : kappas) {
            for (std::uint64_t seed : config.seeds) {
              cells.push_back(
                  {cells.size(), make_kind(step, variant), S, sampler, kappa, seed});
            }
          }
        }
      }
    }
  }
  return cells;
}

MetricReport evaluate_samples(const Eigen::MatrixXd& samples, const GaussianMixture& mixture,
                              const std::vector<int>& labels) {
  MetricReport report;
  report.generated_samples = samples.rows();
  report.frechet =
      frechet_to_reference(samples, Moments{mixture.mean(), mixture.covariance()});
  if (mixture.labeled()) {
    const Eigen::MatrixXd probs = classify(mixture, samples);
    report.inception_score = inception_score(probs);
    if (!labels.empty()) report.accuracy = accuracy(probs, labels);
  }
  return report;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  const GaussianMixture mixture = load_mixture(config);
  const NoiseLevelMap map{VarianceSchedule(config.schedule)};
  std::unique_ptr<ToyRegressor> trained;
  if (config.model.type == ModelChoice::Type::kTrained) {
    trained = std::make_unique<ToyRegressor>(load_regressor(config.model.path));
  }

  SweepResult result;
  result.config_hash = fnv1a64(config.source.dump());
  const std::vector<SweepCell> cells = expand_cells(config);
  result.rows.resize(cells.size());

  detail::parallel_for(cells.size(), config.threads, [&](std::size_t i) {
    const SweepCell& cell = cells[i];
    SweepRow& row = result.rows[i];
    row.cell = cell;
    const auto start = std::chrono::steady_clock::now();
    try {
      const FastSchedule fs = build_fast_schedule(map, cell.kind, cell.steps);
      row.effective_steps = fs.steps;
      const SampleBatch batch = generate_cell(config, cell, fs, mixture, map, trained.get());
      row.model_calls_per_chain = batch.model_calls / std::uint64_t(batch.samples.rows());
      row.normal_draws = batch.normal_draws;
      row.metrics = evaluate_samples(batch.samples, mixture, batch.labels);
      row.ok = true;
    } catch (const Error& e) {
      row.ok = false;
      row.reason = e.what();
    }
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  return result;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "# fastdpm-sweep schema=" << kSweepSchemaVersion
      << " config_hash=" << hex64(result.config_hash) << '\n';
  out << "kind,variant,S,effective_S,sampler,kappa,seed,status,frechet,inception_score,"
         "accuracy,model_calls_per_chain,normal_draws,reason\n";
  for (const SweepRow& row : result.rows) {
    const SweepCell& c = row.cell;
    out << kind_family(c.kind) << ',' << to_string(kind_variant(c.kind)) << ',' << c.steps
        << ',' << row.effective_steps << ',' << to_string(c.sampler) << ','
        << (c.kappa ? format_double(*c.kappa) : "") << ',' << c.seed << ','
        << (row.ok ? "ok" : "failed") << ',';
    if (row.ok) {
      out << format_double(row.metrics.frechet) << ','
          << (row.metrics.inception_score ? format_double(*row.metrics.inception_score) : "")
          << ','
          << (row.metrics.accuracy ? format_double(*row.metrics.accuracy) : "") << ','
          << row.model_calls_per_chain << ',' << row.normal_draws << ',';
    } else {
      out << ",,,,,";
    }
    out << csv_safe(row.reason) << '\n';
  }
  return out.str();
}

Json sweep_to_json(const SweepResult& result, const ExperimentConfig& config) {
  Json rows = Json::array();
  for (const SweepRow& row : result.rows) {
    const SweepCell& c = row.cell;
    Json r{{"kind", kind_family(c.kind)},
           {"variant", to_string(kind_variant(c.kind))},
           {"S", c.steps},
           {"effective_S", row.effective_steps},
           {"sampler", to_string(c.sampler)},
           {"seed", c.seed},
           {"status", row.ok ? "ok" : "failed"}};
    r["kappa"] = c.kappa ? Json(*c.kappa) : Json(nullptr);
    if (row.ok) {
      r["metrics"] = to_json(row.metrics);
      r["model_calls_per_chain"] = row.model_calls_per_chain;
      r["normal_draws"] = row.normal_draws;
    } else {
      r["reason"] = row.reason;
    }
    rows.push_back(std::move(r));
  }
  return Json{{"schema_version", kSweepSchemaVersion},
              {"config_hash", hex64(result.config_hash)},
              {"config", config.source},
              {"rows", rows}};
}

void write_sweep(const SweepResult& result, const ExperimentConfig& config,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "sweep.csv", sweep_to_csv(result));
  write_text_file(dir / "sweep.json", sweep_to_json(result, config).dump(2) + "\n");
  Json timings = Json::array();
  for (const SweepRow& row : result.rows) {
    timings.push_back({{"cell", row.cell.index}, {"seconds", row.seconds}});
  }
  write_text_file(dir / "timings.json", timings.dump(2) + "\n");
}

std::string inspect_schedule(const ScheduleDescriptor& descriptor, ScheduleKind kind,
                             int steps, bool as_json) {
  if (steps < 1) throw ValidationError("S must be >= 1");
  const NoiseLevelMap map{VarianceSchedule(descriptor)};
  const FastSchedule fs = build_fast_schedule(map, kind, steps);
  const double residual = constraint_residual(fs, map.schedule());
  std::optional<bool> step_as_var;
  if (fs.is_step()) step_as_var = step_as_var_equivalence(fs);

  if (as_json) {
    Json j = to_json(fs);
    j["constraint_residual"] = residual;
    j["step_as_var"] = step_as_var ? Json(*step_as_var) : Json(nullptr);
    return j.dump(2) + "\n";
  }

  std::ostringstream out;
  out << to_string(fs.kind) << "  S=" << fs.steps << "  T=" << descriptor.num_steps
      << "  c=" << format_double(fs.c) << '\n';
  for (const auto& warning : fs.warnings) out << "warning: " << warning << '\n';
  char line[160];
  std::snprintf(line, sizeof line, "%5s %6s %22s %22s %22s %22s\n", "s", "tau", "r", "eta",
                "eta_tilde", "t_cont");
  out << line;
  for (int s = 1; s <= fs.steps; ++s) {
    std::snprintf(line, sizeof line, "%5d %6s %22.15e %22.15e %22.15e %22.12f\n", s,
                  fs.is_step() ? std::to_string(fs.tau[s]).c_str() : "-", fs.r[s], fs.eta[s],
                  fs.eta_tilde[s], fs.t_cont[s]);
    out << line;
  }
  out << "constraint residual (log): " << format_double(residual) << '\n';
  out << "STEP-as-VAR check: "
      << (step_as_var ? (*step_as_var ? "pass" : "FAIL") : "n/a") << '\n';
  return out.str();
}

}  // namespace fastdpm
