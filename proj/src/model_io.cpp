#include "headmotion/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hm {

using nlohmann::json;

namespace {

std::string kind_prefix(ModelLoadErrorKind kind) {
  switch (kind) {
    case ModelLoadErrorKind::parse_error: return "parse error";
    case ModelLoadErrorKind::version_mismatch: return "version mismatch";
    case ModelLoadErrorKind::dimension_mismatch: return "dimension mismatch";
    case ModelLoadErrorKind::non_finite: return "non-finite value";
  }
  return "error";
}

[[noreturn]] void fail(ModelLoadErrorKind kind, const std::string& detail) {
  throw ModelLoadError(kind, detail);
}

json frame_json(const Frame& f) { return json::array({f[0], f[1], f[2]}); }

double number_at(const json& j, const std::string& where) {
  if (j.is_null()) fail(ModelLoadErrorKind::non_finite, where);
  if (!j.is_number()) fail(ModelLoadErrorKind::parse_error, where + " is not a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(ModelLoadErrorKind::non_finite, where);
  return v;
}

const json& field(const json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name)) {
    fail(ModelLoadErrorKind::parse_error, std::string("missing field '") + name + "'");
  }
  return obj.at(name);
}

Frame frame_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != kChannels) {
    fail(ModelLoadErrorKind::dimension_mismatch, where + " must have 3 entries");
  }
  Frame f{};
  for (int c = 0; c < kChannels; ++c) f[c] = number_at(j[c], where);
  return f;
}

}  // namespace

ModelLoadError::ModelLoadError(ModelLoadErrorKind kind, const std::string& detail)
    : DataError(kind_prefix(kind) + ": " + detail), kind_(kind) {}

void save_model(std::ostream& out, const MlpModel& model) {
  model.validate();
  json j;
  j["format_version"] = MlpModel::kFormatVersion;
  j["window_layout"] = "frame-major";
  j["channels"] = kChannels;
  j["sample_rate"] = model.sample_rate;
  j["layer_sizes"] = model.layer_sizes();
  j["hidden_activation"] = activation_name(model.hidden_activation);
  j["output_activation"] = "linear";
  j["input_dropout_rate"] = model.input_dropout_rate;
  j["norm_stats"] = {{"mean", frame_json(model.norm_stats.mean)},
                     {"std", frame_json(model.norm_stats.std)}};
  json layers = json::array();
  for (const auto& l : model.layers) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(l.weights.size()));
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.push_back(l.weights(r, c));
    std::vector<double> b(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back({{"fan_in", l.weights.rows()},
                      {"fan_out", l.weights.cols()},
                      {"weights", std::move(w)},
                      {"bias", std::move(b)}});
  }
  j["layers"] = std::move(layers);
  out << j.dump() << '\n';
}

void save_model(const std::filesystem::path& path, const MlpModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  save_model(out, model);
  if (!out) throw DataError("write failed: " + path.string());
}

MlpModel load_model(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ModelLoadErrorKind::parse_error, e.what());
  }
  if (!j.is_object()) fail(ModelLoadErrorKind::parse_error, "top level is not an object");

  const json& version = field(j, "format_version");
  if (!version.is_number_integer() || version.get<int>() != MlpModel::kFormatVersion) {
    fail(ModelLoadErrorKind::version_mismatch,
         "expected format_version " + std::to_string(MlpModel::kFormatVersion) + ", got " +
             version.dump());
  }
  if (j.contains("window_layout") && j["window_layout"] != "frame-major") {
    fail(ModelLoadErrorKind::parse_error, "unsupported window_layout " + j["window_layout"].dump());
  }

  MlpModel m;
  try {
    m.sample_rate = number_at(field(j, "sample_rate"), "sample_rate");
    m.hidden_activation = parse_activation(field(j, "hidden_activation").get<std::string>());
    if (field(j, "output_activation") != "linear") {
      fail(ModelLoadErrorKind::parse_error, "output_activation must be linear");
    }
    m.input_dropout_rate = number_at(field(j, "input_dropout_rate"), "input_dropout_rate");
    const json& stats = field(j, "norm_stats");
    m.norm_stats.mean = frame_from(field(stats, "mean"), "norm_stats.mean");
    m.norm_stats.std = frame_from(field(stats, "std"), "norm_stats.std");

    const auto sizes = field(j, "layer_sizes").get<std::vector<int>>();
    const json& layers = field(j, "layers");
    if (!layers.is_array() || sizes.size() != layers.size() + 1) {
      fail(ModelLoadErrorKind::dimension_mismatch,
           "layer_sizes lists " + std::to_string(sizes.size()) + " sizes for " +
               std::to_string(layers.is_array() ? layers.size() : 0) + " layers");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const std::string name = "layer " + std::to_string(i);
      const json& lj = layers[i];
      const auto fan_in = field(lj, "fan_in").get<long>();
      const auto fan_out = field(lj, "fan_out").get<long>();
      if (fan_in != sizes[i] || fan_out != sizes[i + 1]) {
        fail(ModelLoadErrorKind::dimension_mismatch,
             name + " is " + std::to_string(fan_in) + "x" + std::to_string(fan_out) +
                 ", layer_sizes says " + std::to_string(sizes[i]) + "x" +
                 std::to_string(sizes[i + 1]));
      }
      const json& w = field(lj, "weights");
      const json& b = field(lj, "bias");
      if (!w.is_array() || static_cast<long>(w.size()) != fan_in * fan_out) {
        fail(ModelLoadErrorKind::dimension_mismatch,
             name + " weights has " + std::to_string(w.is_array() ? w.size() : 0) +
                 " values, expected " + std::to_string(fan_in * fan_out));
      }
      if (!b.is_array() || static_cast<long>(b.size()) != fan_out) {
        fail(ModelLoadErrorKind::dimension_mismatch,
             name + " bias has " + std::to_string(b.is_array() ? b.size() : 0) +
                 " values, expected " + std::to_string(fan_out));
      }
      DenseLayer l;
      l.weights.resize(fan_in, fan_out);
      l.bias.resize(fan_out);
      std::size_t k = 0;
      for (long r = 0; r < fan_in; ++r)
        for (long c = 0; c < fan_out; ++c) l.weights(r, c) = number_at(w[k++], name + " weights");
      for (long c = 0; c < fan_out; ++c) l.bias(c) = number_at(b[c], name + " bias");
      m.layers.push_back(std::move(l));
    }
  } catch (const json::exception& e) {
    fail(ModelLoadErrorKind::parse_error, e.what());
  } catch (const ModelLoadError&) {
    throw;
  } catch (const DataError& e) {
    fail(ModelLoadErrorKind::parse_error, e.what());
  }

  try {
    m.validate();
    for (int c = 0; c < kChannels; ++c)
      if (!(m.norm_stats.std[c] > 0.0)) throw DataError("norm_stats.std must be positive");
    if (!(m.sample_rate > 0.0)) throw DataError("sample_rate must be positive");
  } catch (const DataError& e) {
    std::string detail = e.what();
    const std::string prefix = "dimension mismatch: ";
    if (detail.rfind(prefix, 0) == 0) detail.erase(0, prefix.size());
    fail(ModelLoadErrorKind::dimension_mismatch, detail);
  }
  return m;
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return load_model(in);
}

}  // namespace hm
