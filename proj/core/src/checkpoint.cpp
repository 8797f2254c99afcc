// Copyright 2026 The spokenvec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <map>
#include <sstream>

#include "spokenvec/binary_io.hpp"
#include "spokenvec/text.hpp"
#include "spokenvec/trainer.hpp"

namespace spokenvec::train {
namespace {

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string loss_name(nn::LossNormalization l) {
  return l == nn::LossNormalization::kPerFrame ? "per-frame" : "raw-sum";
}

class KeyValues {
 public:
  explicit KeyValues(std::string_view block) {
    for (auto line : text::split(block, '\n')) {
      line = text::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw FormatError("checkpoint config line without '=': " +
                          std::string(line));
      }
      values_[std::string(text::trim(line.substr(0, eq)))] =
          std::string(text::trim(line.substr(eq + 1)));
    }
  }

  const std::string& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
      throw FormatError("checkpoint config is missing '" + key + "'");
    }
    return it->second;
  }

  double number(const std::string& key) const {
    auto v = text::parse_double(get(key));
    if (!v) throw FormatError("checkpoint config '" + key + "' is not a number");
    return *v;
  }

  long long integer(const std::string& key) const {
    const double v = number(key);
    if (v != static_cast<double>(static_cast<long long>(v))) {
      throw FormatError("checkpoint config '" + key + "' is not an integer");
    }
    return static_cast<long long>(v);
  }

  std::uint64_t unsigned_integer(const std::string& key) const {
    auto v = text::parse_size(get(key));
    if (!v) throw FormatError("checkpoint config '" + key + "' is not an integer");
    return *v;
  }

 private:
  std::map<std::string, std::string> values_;
};

struct DecodedHeader {
  nn::ModelConfig model;
  TrainConfig config;
  int epoch = 0;
  double running_loss = 0;
};

DecodedHeader parse_config_block(std::string_view block) {
  KeyValues kv(block);
  DecodedHeader h;
  h.model.input_dim = static_cast<int>(kv.integer("model.input_dim"));
  h.model.hidden_size = static_cast<int>(kv.integer("model.hidden_size"));
  h.model.encoder_layers = static_cast<int>(kv.integer("model.encoder_layers"));
  const auto& loss = kv.get("model.loss");
  if (loss == "per-frame") {
    h.model.loss = nn::LossNormalization::kPerFrame;
  } else if (loss == "raw-sum") {
    h.model.loss = nn::LossNormalization::kRawSum;
  } else {
    throw FormatError("unknown loss normalization '" + loss + "'");
  }
  h.model.teacher_forcing = kv.get("model.teacher_forcing") == "true";
  h.config.learning_rate = kv.number("train.learning_rate");
  h.config.epochs = static_cast<int>(kv.integer("train.epochs"));
  h.config.k = static_cast<int>(kv.integer("train.k"));
  h.config.batch_size = static_cast<int>(kv.integer("train.batch_size"));
  const auto& clip = kv.get("train.grad_clip_norm");
  if (clip == "none") {
    h.config.grad_clip_norm.reset();
  } else {
    h.config.grad_clip_norm = kv.number("train.grad_clip_norm");
  }
  h.config.seed = kv.unsigned_integer("train.seed");
  try {
    h.config.precision = parse_precision(kv.get("train.precision"));
  } catch (const ConfigError& e) {
    throw FormatError(e.what());
  }
  h.config.threads = static_cast<int>(kv.integer("train.threads"));
  h.epoch = static_cast<int>(kv.integer("state.epoch"));
  h.running_loss = kv.number("state.running_loss");
  return h;
}

}  // namespace

std::string format_config(const nn::ModelConfig& model,
                          const TrainConfig& config) {
  std::ostringstream out;
  out << "model.input_dim = " << model.input_dim << '\n'
      << "model.hidden_size = " << model.hidden_size << '\n'
      << "model.encoder_layers = " << model.encoder_layers << '\n'
      << "model.loss = " << loss_name(model.loss) << '\n'
      << "model.teacher_forcing = " << (model.teacher_forcing ? "true" : "false")
      << '\n'
      << "train.learning_rate = " << exact(config.learning_rate) << '\n'
      << "train.epochs = " << config.epochs << '\n'
      << "train.k = " << config.k << '\n'
      << "train.batch_size = " << config.batch_size << '\n'
      << "train.grad_clip_norm = "
      << (config.grad_clip_norm ? exact(*config.grad_clip_norm) : "none")
      << '\n'
      << "train.seed = " << config.seed << '\n'
      << "train.precision = " << to_string(config.precision) << '\n'
      << "train.threads = " << config.threads << '\n';
  return out.str();
}

template <typename S>
std::string encode_checkpoint(const TrainState<S>& state) {
  auto cfg = state.config;
  cfg.precision = std::is_same_v<S, float> ? Precision::kF32 : Precision::kF64;
  std::string block = format_config(state.model, cfg);
  block += "state.epoch = " + std::to_string(state.epoch) + "\n";
  block += "state.running_loss = " + exact(state.running_loss) + "\n";

  io::ByteWriter w;
  w.put_bytes(std::string_view(kCheckpointMagic, 4));
  w.put_u32(kCheckpointVersion);
  w.put_string(block);
  const auto& norm = state.normalization;
  w.put_u32(static_cast<std::uint32_t>(norm.mean.size()));
  for (Eigen::Index i = 0; i < norm.mean.size(); ++i) w.put_f64(norm.mean(i));
  for (Eigen::Index i = 0; i < norm.stddev.size(); ++i) w.put_f64(norm.stddev(i));
  const auto& flat = state.params.flat();
  w.put_u64(static_cast<std::uint64_t>(flat.size()));
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    if constexpr (std::is_same_v<S, float>) {
      w.put_f32(flat(i));
    } else {
      w.put_f64(flat(i));
    }
  }
  std::ostringstream rng;
  rng << state.rng;
  w.put_string(rng.str());
  return w.bytes();
}

template <typename S>
TrainState<S> decode_checkpoint(std::string_view bytes, CheckpointInfo* info) {
  io::ByteReader r(bytes);
  if (r.take(4, "magic") != std::string_view(kCheckpointMagic, 4)) {
    throw FormatError("not a checkpoint file (bad magic)");
  }
  const auto version = r.get_u32("version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " +
                      std::to_string(version));
  }
  auto header = parse_config_block(r.get_string("config block"));
  header.model.validate();

  TrainState<S> state;
  state.model = header.model;
  state.config = header.config;
  state.epoch = header.epoch;
  state.running_loss = header.running_loss;

  const auto d = r.get_u32("normalization dimension");
  state.normalization.mean.resize(d);
  state.normalization.stddev.resize(d);
  for (std::uint32_t i = 0; i < d; ++i) {
    state.normalization.mean(i) = r.get_f64("normalization mean");
  }
  for (std::uint32_t i = 0; i < d; ++i) {
    state.normalization.stddev(i) = r.get_f64("normalization stddev");
  }

  const auto stored = header.config.precision;
  nn::ModelParams<S> params(header.model);
  const auto count = r.get_u64("parameter count");
  if (count != static_cast<std::uint64_t>(params.size())) {
    throw CorruptionError("checkpoint holds " + std::to_string(count) +
                          " parameters, model layout needs " +
                          std::to_string(params.size()));
  }
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double v = stored == Precision::kF32
                         ? static_cast<double>(r.get_f32("parameters"))
                         : r.get_f64("parameters");
    params.flat()(i) = static_cast<S>(v);
  }
  state.params = std::move(params);

  std::istringstream rng(r.get_string("rng state"));
  rng >> state.rng;
  if (!rng) throw CorruptionError("unreadable rng state");
  if (r.remaining() != 0) throw CorruptionError("trailing bytes in checkpoint");

  const auto wanted =
      std::is_same_v<S, float> ? Precision::kF32 : Precision::kF64;
  state.config.precision = wanted;
  if (info != nullptr) {
    info->stored_precision = stored;
    info->converted = stored != wanted;
  }
  return state;
}

template <typename S>
void save_checkpoint(const TrainState<S>& state,
                     const std::filesystem::path& path) {
  io::write_file_atomic(path, encode_checkpoint(state));
}

template <typename S>
TrainState<S> load_checkpoint(const std::filesystem::path& path,
                              CheckpointInfo* info) {
  return decode_checkpoint<S>(io::read_file(path), info);
}

Precision checkpoint_precision(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::ByteReader r(bytes);
  if (r.take(4, "magic") != std::string_view(kCheckpointMagic, 4)) {
    throw FormatError("not a checkpoint file (bad magic)");
  }
  if (r.get_u32("version") != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version");
  }
  return parse_config_block(r.get_string("config block")).config.precision;
}

template std::string encode_checkpoint<float>(const TrainState<float>&);
template std::string encode_checkpoint<double>(const TrainState<double>&);
template TrainState<float> decode_checkpoint<float>(std::string_view,
                                                    CheckpointInfo*);
template TrainState<double> decode_checkpoint<double>(std::string_view,
                                                      CheckpointInfo*);
template void save_checkpoint<float>(const TrainState<float>&,
                                     const std::filesystem::path&);
template void save_checkpoint<double>(const TrainState<double>&,
                                      const std::filesystem::path&);
template TrainState<float> load_checkpoint<float>(const std::filesystem::path&,
                                                  CheckpointInfo*);
template TrainState<double> load_checkpoint<double>(
    const std::filesystem::path&, CheckpointInfo*);

}  // namespace spokenvec::train
