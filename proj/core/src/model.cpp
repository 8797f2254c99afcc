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

#include "spokenvec/model.hpp"

#include <cmath>
#include <random>

#include "spokenvec/error.hpp"

namespace spokenvec::nn {

void ModelConfig::validate() const {
  if (input_dim < 1) throw ConfigError("input_dim must be >= 1");
  if (hidden_size < 1) throw ConfigError("hidden_size must be >= 1");
  if (encoder_layers < 1) throw ConfigError("encoder_layers must be >= 1");
}

template <typename Scalar>
ModelParams<Scalar>::ModelParams(const ModelConfig& config) : config_(config) {
  config_.validate();
  const Eigen::Index h = config_.hidden_size;
  const Eigen::Index d = config_.input_dim;
  Eigen::Index offset = 0;
  auto add = [&](std::string name, Eigen::Index rows, Eigen::Index cols) {
    blocks_.push_back({std::move(name), offset, rows, cols});
    offset += rows * cols;
  };
  auto add_layer = [&](const std::string& prefix, Eigen::Index in) {
    add(prefix + ".w_input", 4 * h, in);
    add(prefix + ".w_recurrent", 4 * h, h);
    add(prefix + ".bias", 4 * h, 1);
  };
  for (int l = 0; l < config_.encoder_layers; ++l) {
    add_layer("encoder[" + std::to_string(l) + "]", l == 0 ? d : h);
  }
  add_layer("decoder", d);
  add("projection.weight", d, h);
  add("projection.bias", d, 1);
  flat_ = Vector<Scalar>::Zero(offset);
}

template <typename Scalar>
LayerView<Scalar> ModelParams<Scalar>::layer_at(std::size_t first) {
  const auto& wi = blocks_[first];
  const auto& wr = blocks_[first + 1];
  const auto& b = blocks_[first + 2];
  Scalar* base = flat_.data();
  return {{base + wi.offset, wi.rows, wi.cols},
          {base + wr.offset, wr.rows, wr.cols},
          {base + b.offset, b.rows}};
}

template <typename Scalar>
ConstLayerView<Scalar> ModelParams<Scalar>::layer_at(std::size_t first) const {
  const auto& wi = blocks_[first];
  const auto& wr = blocks_[first + 1];
  const auto& b = blocks_[first + 2];
  const Scalar* base = flat_.data();
  return {{base + wi.offset, wi.rows, wi.cols},
          {base + wr.offset, wr.rows, wr.cols},
          {base + b.offset, b.rows}};
}

template <typename Scalar>
LayerView<Scalar> ModelParams<Scalar>::encoder_layer(int layer) {
  return layer_at(3 * static_cast<std::size_t>(layer));
}

template <typename Scalar>
ConstLayerView<Scalar> ModelParams<Scalar>::encoder_layer(int layer) const {
  return layer_at(3 * static_cast<std::size_t>(layer));
}

template <typename Scalar>
LayerView<Scalar> ModelParams<Scalar>::decoder() {
  return layer_at(3 * static_cast<std::size_t>(config_.encoder_layers));
}

template <typename Scalar>
ConstLayerView<Scalar> ModelParams<Scalar>::decoder() const {
  return layer_at(3 * static_cast<std::size_t>(config_.encoder_layers));
}

template <typename Scalar>
Eigen::Map<Matrix<Scalar>> ModelParams<Scalar>::projection() {
  const auto& b = blocks_[blocks_.size() - 2];
  return {flat_.data() + b.offset, b.rows, b.cols};
}

template <typename Scalar>
Eigen::Map<const Matrix<Scalar>> ModelParams<Scalar>::projection() const {
  const auto& b = blocks_[blocks_.size() - 2];
  return {flat_.data() + b.offset, b.rows, b.cols};
}

template <typename Scalar>
Eigen::Map<Vector<Scalar>> ModelParams<Scalar>::projection_bias() {
  const auto& b = blocks_.back();
  return {flat_.data() + b.offset, b.rows};
}

template <typename Scalar>
Eigen::Map<const Vector<Scalar>> ModelParams<Scalar>::projection_bias() const {
  const auto& b = blocks_.back();
  return {flat_.data() + b.offset, b.rows};
}

template <typename Scalar>
std::string ModelParams<Scalar>::describe(Eigen::Index flat_index) const {
  for (const auto& b : blocks_) {
    if (flat_index >= b.offset && flat_index < b.offset + b.size()) {
      const auto local = flat_index - b.offset;
      return b.name + "(" + std::to_string(local % b.rows) + "," +
             std::to_string(local / b.rows) + ")";
    }
  }
  return "<out of range " + std::to_string(flat_index) + ">";
}

template <typename Scalar>
ModelParams<Scalar> init_params(const ModelConfig& config, std::uint64_t seed) {
  ModelParams<double> params(config);
  std::mt19937_64 rng(seed);
  const auto& blocks = params.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    auto slice = params.flat().segment(b.offset, b.size());
    if (b.cols == 1) {
      slice.setZero();
      continue;
    }
    const double r = 1.0 / std::sqrt(static_cast<double>(b.cols));
    std::uniform_real_distribution<double> dist(-r, r);
    for (Eigen::Index j = 0; j < slice.size(); ++j) slice(j) = dist(rng);
  }
  const Eigen::Index h = config.hidden_size;
  for (int l = 0; l < config.encoder_layers; ++l) {
    params.encoder_layer(l).bias.segment(h, h).setOnes();
  }
  params.decoder().bias.segment(h, h).setOnes();
  if constexpr (std::is_same_v<Scalar, double>) {
    return params;
  } else {
    return params.template cast<Scalar>();
  }
}

template class ModelParams<float>;
template class ModelParams<double>;
template ModelParams<float> init_params<float>(const ModelConfig&, std::uint64_t);
template ModelParams<double> init_params<double>(const ModelConfig&,
                                                 std::uint64_t);

}  // namespace spokenvec::nn
