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

#include "fastdpm/serialization.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "fastdpm/error.hpp"

namespace fastdpm {
namespace {

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const char* ext) {
  return std::filesystem::path(prefix.string() + ext);
}

void append_le(std::string& out, double value) {
  const auto bits = std::bit_cast<std::uint64_t>(value);
  for (int i = 0; i < 8; ++i) out.push_back(char((bits >> (8 * i)) & 0xff));
}

double read_le(const std::string& in, std::size_t offset) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= std::uint64_t(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

std::string read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_binary(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw ValidationError("failed writing " + path.string());
}

template <typename T>
std::vector<T> tail(const std::vector<T>& v) {
  return v.empty() ? v : std::vector<T>(v.begin() + 1, v.end());
}

Json vector_json(const Eigen::VectorXd& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(vector_json(m.row(i).transpose()));
  }
  return rows;
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_binary(path, text);
}

Json to_json(const ScheduleDescriptor& d) {
  return Json{{"beta_1", d.beta_1}, {"beta_T", d.beta_T}, {"T", d.num_steps}};
}

ScheduleDescriptor schedule_descriptor_from_json(const Json& j) {
  try {
    return ScheduleDescriptor{j.at("beta_1").get<double>(), j.at("beta_T").get<double>(),
                              j.at("T").get<int>()};
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("bad schedule descriptor: ") + e.what());
  }
}

Json to_json(const FastSchedule& fs) {
  Json j{{"kind", to_string(fs.kind)},
         {"S", fs.steps},
         {"requested_S", fs.requested_steps},
         {"c", fs.c},
         {"schedule", to_json(fs.source)},
         {"eta", tail(fs.eta)},
         {"eta_tilde", tail(fs.eta_tilde)},
         {"gamma_bar", tail(fs.gamma_bar)},
         {"r", tail(fs.r)},
         {"t_cont", tail(fs.t_cont)},
         {"warnings", fs.warnings}};
  if (fs.is_step()) j["tau"] = tail(fs.tau);
  return j;
}

Json to_json(const GaussianMixture& gm) {
  Json means = Json::array();
  Json covs = Json::array();
  for (int k = 0; k < gm.num_components(); ++k) {
    means.push_back(vector_json(gm.means()[k]));
    covs.push_back(matrix_json(gm.covariances()[k]));
  }
  Json j{{"weights", gm.weights()}, {"means", means}, {"covariances", covs}};
  if (gm.labeled()) j["labels"] = gm.labels();
  return j;
}

GaussianMixture gaussian_mixture_from_json(const Json& j) {
  try {
    auto weights = j.at("weights").get<std::vector<double>>();
    std::vector<Eigen::VectorXd> means;
    for (const auto& m : j.at("means")) {
      const auto v = m.get<std::vector<double>>();
      means.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size())));
    }
    std::vector<Eigen::MatrixXd> covs;
    for (const auto& c : j.at("covariances")) {
      const auto rows = c.get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd m(Eigen::Index(rows.size()),
                        rows.empty() ? 0 : Eigen::Index(rows.front().size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (Eigen::Index(rows[r].size()) != m.cols()) {
          throw ValidationError("ragged covariance matrix");
        }
        for (std::size_t c2 = 0; c2 < rows[r].size(); ++c2) {
          m(Eigen::Index(r), Eigen::Index(c2)) = rows[r][c2];
        }
      }
      covs.push_back(std::move(m));
    }
    std::vector<int> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<int>>();
    return GaussianMixture(std::move(weights), std::move(means), std::move(covs),
                           std::move(labels));
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("bad mixture specification: ") + e.what());
  }
}

Json to_json(const Provenance& p) {
  Json j{{"schedule", to_json(p.schedule)},
         {"sampler", to_string(p.sampler)},
         {"steps", p.steps},
         {"kappa", p.kappa},
         {"seed", p.seed},
         {"final_step_noise", to_string(p.final_step_noise)}};
  j["fast_kind"] = p.fast_kind ? Json(to_string(*p.fast_kind)) : Json(nullptr);
  return j;
}

Provenance provenance_from_json(const Json& j) {
  try {
    Provenance p;
    p.schedule = schedule_descriptor_from_json(j.at("schedule"));
    p.sampler = parse_sampler_kind(j.at("sampler").get<std::string>());
    p.steps = j.at("steps").get<int>();
    p.kappa = j.at("kappa").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.final_step_noise = parse_final_step_noise(j.at("final_step_noise").get<std::string>());
    if (j.contains("fast_kind") && !j.at("fast_kind").is_null()) {
      p.fast_kind = parse_schedule_kind(j.at("fast_kind").get<std::string>());
    }
    return p;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("bad provenance: ") + e.what());
  }
}

Json to_json(const MetricReport& report) {
  Json j{{"frechet", report.frechet},
         {"generated_samples", report.generated_samples},
         {"reference_samples", report.reference_samples}};
  j["inception_score"] =
      report.inception_score ? Json(*report.inception_score) : Json(nullptr);
  j["accuracy"] = report.accuracy ? Json(*report.accuracy) : Json(nullptr);
  return j;
}

void write_sample_batch(const SampleBatch& batch, const std::filesystem::path& prefix) {
  const Eigen::MatrixXd& m = batch.samples;
  std::string bytes;
  bytes.reserve(std::size_t(m.size()) * 8);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) append_le(bytes, m(i, k));
  }
  write_binary(with_suffix(prefix, ".bin"), bytes);
  const Json meta{{"format", "float64-le-row-major"},
                  {"rows", m.rows()},
                  {"cols", m.cols()},
                  {"model_calls", batch.model_calls},
                  {"normal_draws", batch.normal_draws},
                  {"provenance", to_json(batch.provenance)}};
  Json sidecar = meta;
  if (!batch.labels.empty()) sidecar["labels"] = batch.labels;
  write_text_file(with_suffix(prefix, ".json"), sidecar.dump(2) + "\n");
}

SampleBatch read_sample_batch(const std::filesystem::path& prefix) {
  const Json meta = read_json_file(with_suffix(prefix, ".json"));
  SampleBatch batch;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  try {
    rows = meta.at("rows").get<Eigen::Index>();
    cols = meta.at("cols").get<Eigen::Index>();
    batch.model_calls = meta.value("model_calls", std::uint64_t{0});
    batch.normal_draws = meta.value("normal_draws", std::uint64_t{0});
    if (meta.contains("labels")) batch.labels = meta.at("labels").get<std::vector<int>>();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("bad sample sidecar: ") + e.what());
  }
  batch.provenance = provenance_from_json(meta.at("provenance"));
  const std::string bytes = read_binary(with_suffix(prefix, ".bin"));
  if (rows < 0 || cols < 0 || bytes.size() != std::size_t(rows * cols * 8)) {
    throw ValidationError("sample file size does not match its sidecar shape");
  }
  if (!batch.labels.empty() && Eigen::Index(batch.labels.size()) != rows) {
    throw ValidationError("sample sidecar has the wrong number of labels");
  }
  batch.samples.resize(rows, cols);
  std::size_t offset = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k, offset += 8) {
      batch.samples(i, k) = read_le(bytes, offset);
    }
  }
  return batch;
}

std::string samples_to_csv(const Eigen::MatrixXd& samples) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index k = 0; k < samples.cols(); ++k) out << (k ? ",x" : "x") << k;
  out << '\n';
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    for (Eigen::Index k = 0; k < samples.cols(); ++k) {
      out << (k ? "," : "") << samples(i, k);
    }
    out << '\n';
  }
  return out.str();
}

Eigen::MatrixXd samples_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty sample CSV");
  const auto cols = Eigen::Index(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    Eigen::Index count = 0;
    while (std::getline(fields, field, ',')) {
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw ValidationError("non-numeric CSV field '" + field + "'");
      }
      ++count;
    }
    if (count != cols) throw ValidationError("ragged sample CSV");
    ++rows;
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = values[std::size_t(i * cols + k)];
  }
  return m;
}

void save_regressor(const ToyRegressor& model, const std::filesystem::path& prefix) {
  std::string bytes;
  for (const auto& layer : model.layers()) {
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      append_le(bytes, layer.weight.data()[i]);
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) append_le(bytes, layer.bias[i]);
  }
  write_binary(with_suffix(prefix, ".bin"), bytes);
  const Json meta{{"format", "float64-le"},
                  {"widths", model.widths()},
                  {"activation", "tanh"},
                  {"T", model.num_steps()},
                  {"time_feature", "t/T"}};
  write_text_file(with_suffix(prefix, ".json"), meta.dump(2) + "\n");
}

ToyRegressor load_regressor(const std::filesystem::path& prefix) {
  const Json meta = read_json_file(with_suffix(prefix, ".json"));
  std::vector<int> widths;
  int T = 0;
  try {
    widths = meta.at("widths").get<std::vector<int>>();
    T = meta.at("T").get<int>();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("bad regressor metadata: ") + e.what());
  }
  if (widths.size() < 2) throw ValidationError("regressor needs at least two widths");
  const std::string bytes = read_binary(with_suffix(prefix, ".bin"));
  std::size_t expected = 0;
  for (std::size_t l = 1; l < widths.size(); ++l) {
    if (widths[l] < 1 || widths[l - 1] < 1) throw ValidationError("bad regressor widths");
    expected += std::size_t(widths[l]) * (std::size_t(widths[l - 1]) + 1);
  }
  if (bytes.size() != expected * 8) {
    throw ValidationError("regressor parameter file size does not match its widths");
  }
  std::vector<DenseLayer> layers;
  std::size_t offset = 0;
  for (std::size_t l = 1; l < widths.size(); ++l) {
    DenseLayer layer{Eigen::MatrixXd(widths[l], widths[l - 1]), Eigen::VectorXd(widths[l])};
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i, offset += 8) {
      layer.weight.data()[i] = read_le(bytes, offset);
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i, offset += 8) {
      layer.bias[i] = read_le(bytes, offset);
    }
    layers.push_back(std::move(layer));
  }
  return ToyRegressor(std::move(layers), T);
}

}  // namespace fastdpm
