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

#ifndef SPOKENVEC_MODEL_HPP_
#define SPOKENVEC_MODEL_HPP_

#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

namespace spokenvec::nn {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class LossNormalization {
  kPerFrame,  // each target's squared error divided by (T' * d)
  kRawSum,    // plain sum of squared errors
};

struct ModelConfig {
  int input_dim = 13;
  int hidden_size = 300;  // encoder layers, decoder, and embedding size
  int encoder_layers = 3;
  LossNormalization loss = LossNormalization::kPerFrame;
  bool teacher_forcing = true;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// Views over one LSTM layer's parameters inside a flat parameter vector.
// Gate rows are stacked as [input; forget; cell candidate; output].
template <typename Scalar, bool kConst>
struct BasicLayerView {
  using MatrixType =
      std::conditional_t<kConst, const Matrix<Scalar>, Matrix<Scalar>>;
  using VectorType =
      std::conditional_t<kConst, const Vector<Scalar>, Vector<Scalar>>;

  Eigen::Map<MatrixType> w_input;      // 4h x d_in
  Eigen::Map<MatrixType> w_recurrent;  // 4h x h
  Eigen::Map<VectorType> bias;         // 4h

  Eigen::Index hidden_size() const { return w_recurrent.cols(); }
  Eigen::Index input_size() const { return w_input.cols(); }
};

template <typename Scalar>
using LayerView = BasicLayerView<Scalar, false>;
template <typename Scalar>
using ConstLayerView = BasicLayerView<Scalar, true>;

// One named matrix inside the flat parameter vector (column-major).
struct ParamBlock {
  std::string name;
  Eigen::Index offset = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  Eigen::Index size() const { return rows * cols; }
};

// All encoder and decoder weights in one contiguous vector. The order of
// blocks is: for each encoder layer (w_input, w_recurrent, bias), then the
// decoder layer (w_input, w_recurrent, bias), then the output projection
// (weight d x h, bias d). flat() is the canonical enumeration used by the
// optimizer, the gradient checker and the checkpoint format.
template <typename Scalar>
class ModelParams {
 public:
  ModelParams() = default;
  // Zero-initialized parameters with the layout implied by `config`.
  explicit ModelParams(const ModelConfig& config);

  const ModelConfig& config() const noexcept { return config_; }
  const std::vector<ParamBlock>& blocks() const noexcept { return blocks_; }
  Eigen::Index size() const noexcept { return flat_.size(); }

  Vector<Scalar>& flat() noexcept { return flat_; }
  const Vector<Scalar>& flat() const noexcept { return flat_; }

  int num_encoder_layers() const noexcept { return config_.encoder_layers; }
  LayerView<Scalar> encoder_layer(int layer);
  ConstLayerView<Scalar> encoder_layer(int layer) const;
  LayerView<Scalar> decoder();
  ConstLayerView<Scalar> decoder() const;

  Eigen::Map<Matrix<Scalar>> projection();
  Eigen::Map<const Matrix<Scalar>> projection() const;
  Eigen::Map<Vector<Scalar>> projection_bias();
  Eigen::Map<const Vector<Scalar>> projection_bias() const;

  // Human-readable location of a flat index, e.g. "encoder[1].w_recurrent(3,4)".
  std::string describe(Eigen::Index flat_index) const;

  template <typename Other>
  ModelParams<Other> cast() const {
    ModelParams<Other> out(config_);
    out.flat() = flat_.template cast<Other>();
    return out;
  }

 private:
  const ParamBlock& block(std::size_t i) const { return blocks_[i]; }
  LayerView<Scalar> layer_at(std::size_t first_block);
  ConstLayerView<Scalar> layer_at(std::size_t first_block) const;

  ModelConfig config_;
  std::vector<ParamBlock> blocks_;
  Vector<Scalar> flat_;
};

// Weights ~ Uniform(-r, r) with r = 1 / sqrt(fan_in), fan_in being the
// number of columns of each matrix; all biases 0 except the forget-gate
// slices, which are 1. Values are drawn in double precision from a
// mt19937_64 seeded with `seed` and then converted, so the same seed yields
// the same model in either precision.
template <typename Scalar>
ModelParams<Scalar> init_params(const ModelConfig& config, std::uint64_t seed);

extern template class ModelParams<float>;
extern template class ModelParams<double>;

}  // namespace spokenvec::nn

#endif  // SPOKENVEC_MODEL_HPP_
