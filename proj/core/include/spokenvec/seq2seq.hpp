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

// Skip-gram sequence-to-sequence model: a stacked LSTM encoder reads a
// center segment and its final top-layer hidden state is the segment
// embedding z. One shared single-layer LSTM decoder starts from h0 = z,
// c0 = 0 for every neighbouring target segment and is trained to
// reconstruct it frame by frame through a linear output projection.
//
// All functions are pure in (params, inputs). Batched entry points take
// padded, time-major batches; results are identical (up to floating-point
// reassociation) to running each example on its own.

#ifndef SPOKENVEC_SEQ2SEQ_HPP_
#define SPOKENVEC_SEQ2SEQ_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spokenvec/features.hpp"
#include "spokenvec/model.hpp"

namespace spokenvec::nn {

template <typename Scalar>
struct HiddenState {
  Vector<Scalar> h;
  Vector<Scalar> c;

  static HiddenState zeros(Eigen::Index size) {
    return {Vector<Scalar>::Zero(size), Vector<Scalar>::Zero(size)};
  }
};

// gates = W_input x + W_recurrent h_prev + bias, split as [i; f; g; o];
// c = sigmoid(f) * c_prev + sigmoid(i) * tanh(g); h = sigmoid(o) * tanh(c).
template <typename Scalar>
HiddenState<Scalar> lstm_cell_step(const ConstLayerView<Scalar>& layer,
                                   const Vector<Scalar>& x,
                                   const HiddenState<Scalar>& prev);

// Sequences padded to a common length and stored time-major: the frame of
// sequence b at step t is column t * batch + b. Padding columns are zero and
// mask(t, b) is 1 exactly for t < lengths[b].
template <typename Scalar>
struct SequenceBatch {
  Eigen::Index dim = 0;
  Eigen::Index batch = 0;
  Eigen::Index max_length = 0;
  std::vector<Eigen::Index> lengths;
  Matrix<Scalar> frames;  // dim x (max_length * batch)
  Matrix<Scalar> mask;    // max_length x batch

  static SequenceBatch pack(std::span<const FeatureSequence* const> sequences);

  auto step(Eigen::Index t) const { return frames.middleCols(t * batch, batch); }
  Eigen::Index padding_frames() const;
};

// A center segment and the neighbouring segments it must reconstruct.
struct ExampleView {
  const FeatureSequence* center = nullptr;
  std::vector<const FeatureSequence*> targets;
};

template <typename Scalar>
struct PaddedBatch {
  SequenceBatch<Scalar> centers;
  SequenceBatch<Scalar> targets;  // every target of every example
  std::vector<Eigen::Index> target_owner;  // center column of each target
  std::vector<Eigen::Index> first_target;  // per example, plus end sentinel

  Eigen::Index num_examples() const { return centers.batch; }
};

template <typename Scalar>
PaddedBatch<Scalar> make_padded_batch(std::span<const ExampleView> examples);

// Top-layer hidden state after the last frame of each sequence (h x batch).
template <typename Scalar>
Matrix<Scalar> encode_batch(const ModelParams<Scalar>& params,
                            const SequenceBatch<Scalar>& sequences);

template <typename Scalar>
Vector<Scalar> encode(const ModelParams<Scalar>& params,
                      const FeatureSequence& x);

// Runs the decoder for exactly target.length() steps from h0 = z, c0 = 0.
// The step-1 input is a zero frame; later inputs are the previous target
// frame when teacher forcing, otherwise the previous prediction.
template <typename Scalar>
FeatureMatrix decode_target(const ModelParams<Scalar>& params,
                            const Vector<Scalar>& z,
                            const FeatureSequence& target,
                            bool teacher_forcing);

template <typename Scalar>
struct LossBreakdown {
  Scalar total = 0;
  std::vector<Scalar> per_target;
};

// Sum over targets of the (optionally length-normalized) squared error of
// the decoded sequence, using the model's teacher-forcing setting.
template <typename Scalar>
LossBreakdown<Scalar> skipgram_loss(const ModelParams<Scalar>& params,
                                    const ExampleView& example);

// Sum of per-example losses over a padded batch; padded frames contribute
// exactly zero. Per-target losses are appended to `per_target` in batch
// column order when it is non-null.
template <typename Scalar>
Scalar batch_loss(const ModelParams<Scalar>& params,
                  const PaddedBatch<Scalar>& batch,
                  std::vector<Scalar>* per_target = nullptr);

// Adds d(batch_loss)/d(params) into `grad` (which must share the layout of
// `params`) by backpropagation through the decoder steps, the shared
// embeddings, and the encoder. Returns batch_loss.
template <typename Scalar>
Scalar accumulate_gradient(const ModelParams<Scalar>& params,
                           const PaddedBatch<Scalar>& batch,
                           ModelParams<Scalar>& grad);

template <typename Scalar>
struct GradientResult {
  Scalar loss = 0;
  Vector<Scalar> gradient;  // indexed like params.flat()
};

// Exact gradient of skipgram_loss for one example. Throws NumericalError
// naming the first parameter whose gradient is not finite.
template <typename Scalar>
GradientResult<Scalar> skipgram_gradient(const ModelParams<Scalar>& params,
                                         const ExampleView& example);

// Throws NumericalError if any entry of `gradient` is not finite.
template <typename Scalar>
void check_finite_gradient(const ModelParams<Scalar>& params,
                           const Vector<Scalar>& gradient);

struct FiniteDifferenceReport {
  double max_relative_error = 0;
  Eigen::Index worst_index = -1;
  std::string worst_parameter;
  double analytic_at_worst = 0;
  double numeric_at_worst = 0;
  std::size_t checked = 0;
};

// Compares `analytic` against central differences (L(p+eps) - L(p-eps)) /
// (2 eps) of skipgram_loss, one parameter at a time. Relative error is
// |a - n| / max(1e-8, |a| + |n|). When `sample` is set only that many
// randomly chosen parameters are checked.
FiniteDifferenceReport finite_difference_check(
    const ModelParams<double>& params, const ExampleView& example,
    double epsilon, const Eigen::VectorXd& analytic,
    std::optional<std::size_t> sample = std::nullopt,
    std::uint64_t sample_seed = 0);

FiniteDifferenceReport finite_difference_check(
    const ModelParams<double>& params, const ExampleView& example,
    double epsilon, std::optional<std::size_t> sample = std::nullopt,
    std::uint64_t sample_seed = 0);

}  // namespace spokenvec::nn

#endif  // SPOKENVEC_SEQ2SEQ_HPP_
