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

#include "spokenvec/seq2seq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "spokenvec/error.hpp"

namespace spokenvec::nn {
namespace {

using Eigen::Index;

// Activated gates, cell states and hidden states for every step of one
// layer, laid out like SequenceBatch::frames.
template <typename S>
struct LayerTrace {
  Matrix<S> gates;   // 4h x (T * B): [i; f; g; o] after the nonlinearity
  Matrix<S> cells;   // h x (T * B)
  Matrix<S> hidden;  // h x (T * B)
};

template <typename S>
struct DecoderTrace {
  Matrix<S> h0;       // h x C
  Matrix<S> inputs;   // d x (T' * C)
  LayerTrace<S> layer;
  Matrix<S> outputs;  // d x (T' * C)
};

template <typename Block>
void activate(Block&& pre, Index h) {
  using S = typename std::decay_t<Block>::Scalar;
  auto sig = pre.topRows(2 * h).array();
  sig = (S(1) + (-sig).exp()).inverse();
  pre.middleRows(2 * h, h).array() = pre.middleRows(2 * h, h).array().tanh();
  auto out = pre.bottomRows(h).array();
  out = (S(1) + (-out).exp()).inverse();
}

// One recurrent step given the pre-activation block (input and bias terms
// already added); fills gates, cell and hidden for step t.
template <typename S>
void forward_step(const ConstLayerView<S>& layer, LayerTrace<S>& tr, Index t,
                  Index batch, const Matrix<S>* h0) {
  const Index h = layer.hidden_size();
  auto g = tr.gates.middleCols(t * batch, batch);
  if (t > 0) {
    g.noalias() += layer.w_recurrent * tr.hidden.middleCols((t - 1) * batch, batch);
  } else if (h0 != nullptr) {
    g.noalias() += layer.w_recurrent * *h0;
  }
  activate(g, h);
  auto c = tr.cells.middleCols(t * batch, batch);
  c.array() = g.topRows(h).array() * g.middleRows(2 * h, h).array();
  if (t > 0) {
    c.array() += g.middleRows(h, h).array() *
                 tr.cells.middleCols((t - 1) * batch, batch).array();
  }
  tr.hidden.middleCols(t * batch, batch).array() =
      g.bottomRows(h).array() * c.array().tanh();
}

// Runs a layer over inputs that are all known in advance.
template <typename S>
void forward_layer(const ConstLayerView<S>& layer, const Matrix<S>& inputs,
                   Index steps, Index batch, const Matrix<S>* h0,
                   LayerTrace<S>& tr) {
  const Index h = layer.hidden_size();
  tr.gates.noalias() = layer.w_input * inputs;
  tr.gates.colwise() += layer.bias;
  tr.cells.resize(h, steps * batch);
  tr.hidden.resize(h, steps * batch);
  for (Index t = 0; t < steps; ++t) forward_step(layer, tr, t, batch, h0);
}

// Reverse pass through one layer. `extra_dh(t)` yields the gradient that
// reaches h_t from outside the recurrence (an h x B matrix expression);
// `on_step(t, dpre_t)` runs after the pre-activation gradient of step t is
// known. On return `dpre` holds all pre-activation gradients and `dh0` the
// gradient with respect to the initial hidden state.
template <typename S, typename ExtraDh, typename OnStep>
void backward_layer(const ConstLayerView<S>& layer, const LayerTrace<S>& tr,
                    Index steps, Index batch, ExtraDh&& extra_dh,
                    OnStep&& on_step, Matrix<S>& dpre, Matrix<S>& dh0) {
  const Index h = layer.hidden_size();
  dpre.resize(4 * h, steps * batch);
  Matrix<S> dh_carry = Matrix<S>::Zero(h, batch);
  Matrix<S> dc_carry = Matrix<S>::Zero(h, batch);
  Matrix<S> dh(h, batch);
  Matrix<S> dcell(h, batch);
  for (Index t = steps - 1; t >= 0; --t) {
    dh = extra_dh(t);
    dh += dh_carry;
    const auto g = tr.gates.middleCols(t * batch, batch);
    const auto gi = g.topRows(h).array();
    const auto gf = g.middleRows(h, h).array();
    const auto gg = g.middleRows(2 * h, h).array();
    const auto go = g.bottomRows(h).array();
    const auto tc = tr.cells.middleCols(t * batch, batch).array().tanh().eval();

    dcell.array() = dc_carry.array() + dh.array() * go * (S(1) - tc.square());
    auto dp = dpre.middleCols(t * batch, batch);
    dp.topRows(h).array() = dcell.array() * gg * gi * (S(1) - gi);
    if (t > 0) {
      dp.middleRows(h, h).array() =
          dcell.array() * tr.cells.middleCols((t - 1) * batch, batch).array() *
          gf * (S(1) - gf);
    } else {
      dp.middleRows(h, h).setZero();
    }
    dp.middleRows(2 * h, h).array() = dcell.array() * gi * (S(1) - gg.square());
    dp.bottomRows(h).array() = dh.array() * tc * go * (S(1) - go);
    dc_carry.array() = dcell.array() * gf;
    dh_carry.noalias() = layer.w_recurrent.transpose() * dp;
    on_step(t, dp);
  }
  dh0 = std::move(dh_carry);
}

template <typename S>
void accumulate_layer_grads(LayerView<S>& g, const Matrix<S>& dpre,
                            const Matrix<S>& inputs, const LayerTrace<S>& tr,
                            Index steps, Index batch, const Matrix<S>* h0) {
  g.w_input.noalias() += dpre * inputs.transpose();
  if (steps > 1) {
    g.w_recurrent.noalias() +=
        dpre.rightCols((steps - 1) * batch) *
        tr.hidden.leftCols((steps - 1) * batch).transpose();
  }
  if (h0 != nullptr) {
    g.w_recurrent.noalias() += dpre.leftCols(batch) * h0->transpose();
  }
  g.bias += dpre.rowwise().sum();
}

template <typename S>
void check_dims(const ModelParams<S>& params, Index dim, const char* what) {
  if (dim != params.config().input_dim) {
    throw ContractViolation(std::string(what) + " has dimension " +
                            std::to_string(dim) + ", model expects " +
                            std::to_string(params.config().input_dim));
  }
}

template <typename S>
std::vector<LayerTrace<S>> encoder_forward(const ModelParams<S>& params,
                                           const SequenceBatch<S>& seq) {
  check_dims(params, seq.dim, "center segment");
  std::vector<LayerTrace<S>> traces(
      static_cast<std::size_t>(params.num_encoder_layers()));
  for (int l = 0; l < params.num_encoder_layers(); ++l) {
    const Matrix<S>& in =
        l == 0 ? seq.frames : traces[static_cast<std::size_t>(l - 1)].hidden;
    forward_layer(params.encoder_layer(l), in, seq.max_length, seq.batch,
                  static_cast<const Matrix<S>*>(nullptr),
                  traces[static_cast<std::size_t>(l)]);
  }
  return traces;
}

template <typename S>
Matrix<S> final_states(const LayerTrace<S>& top, const SequenceBatch<S>& seq) {
  Matrix<S> z(top.hidden.rows(), seq.batch);
  for (Index b = 0; b < seq.batch; ++b) {
    z.col(b) = top.hidden.col((seq.lengths[static_cast<std::size_t>(b)] - 1) *
                                  seq.batch +
                              b);
  }
  return z;
}

template <typename S>
void decoder_forward(const ModelParams<S>& params, Matrix<S> h0,
                     const SequenceBatch<S>& targets, bool teacher_forcing,
                     DecoderTrace<S>& tr) {
  const auto layer = params.decoder();
  const auto proj = params.projection();
  const auto proj_b = params.projection_bias();
  const Index h = layer.hidden_size();
  const Index cols = targets.batch;
  const Index steps = targets.max_length;
  const Index d = targets.dim;
  tr.h0 = std::move(h0);
  tr.inputs = Matrix<S>::Zero(d, steps * cols);
  if (teacher_forcing) {
    if (steps > 1) {
      tr.inputs.rightCols((steps - 1) * cols) =
          targets.frames.leftCols((steps - 1) * cols);
    }
    forward_layer(layer, tr.inputs, steps, cols, &tr.h0, tr.layer);
    tr.outputs.noalias() = proj * tr.layer.hidden;
    tr.outputs.colwise() += proj_b;
    return;
  }
  tr.layer.gates.resize(4 * h, steps * cols);
  tr.layer.cells.resize(h, steps * cols);
  tr.layer.hidden.resize(h, steps * cols);
  tr.outputs.resize(d, steps * cols);
  for (Index t = 0; t < steps; ++t) {
    if (t > 0) {
      tr.inputs.middleCols(t * cols, cols) =
          tr.outputs.middleCols((t - 1) * cols, cols);
    }
    auto g = tr.layer.gates.middleCols(t * cols, cols);
    g.noalias() = layer.w_input * tr.inputs.middleCols(t * cols, cols);
    g.colwise() += layer.bias;
    forward_step(layer, tr.layer, t, cols, &tr.h0);
    auto y = tr.outputs.middleCols(t * cols, cols);
    y.noalias() = proj * tr.layer.hidden.middleCols(t * cols, cols);
    y.colwise() += proj_b;
  }
}

template <typename S>
Matrix<S> gather_initial_states(const Matrix<S>& z, const PaddedBatch<S>& batch) {
  Matrix<S> h0(z.rows(), batch.targets.batch);
  for (Index c = 0; c < batch.targets.batch; ++c) {
    h0.col(c) = z.col(batch.target_owner[static_cast<std::size_t>(c)]);
  }
  return h0;
}

// Per-column loss weights and the masked residual Y - X.
template <typename S>
struct Residual {
  Matrix<S> diff;            // d x (T' * C), zero on padding
  Vector<S> weights;         // per target column
  std::vector<S> per_target;
  S total = 0;
};

template <typename S>
Residual<S> residual(const ModelParams<S>& params, const DecoderTrace<S>& tr,
                     const SequenceBatch<S>& targets) {
  Residual<S> r;
  const Index cols = targets.batch;
  const Index d = targets.dim;
  r.diff = tr.outputs - targets.frames;
  r.weights.resize(cols);
  for (Index c = 0; c < cols; ++c) {
    const auto len = targets.lengths[static_cast<std::size_t>(c)];
    r.weights(c) = params.config().loss == LossNormalization::kPerFrame
                       ? S(1) / static_cast<S>(len * d)
                       : S(1);
  }
  r.per_target.assign(static_cast<std::size_t>(cols), S(0));
  for (Index t = 0; t < targets.max_length; ++t) {
    for (Index c = 0; c < cols; ++c) {
      auto col = r.diff.col(t * cols + c);
      if (targets.mask(t, c) == S(0)) {
        col.setZero();
        continue;
      }
      r.per_target[static_cast<std::size_t>(c)] += col.squaredNorm();
    }
  }
  for (Index c = 0; c < cols; ++c) {
    auto& v = r.per_target[static_cast<std::size_t>(c)];
    v *= r.weights(c);
    r.total += v;
  }
  return r;
}

}  // namespace

template <typename S>
HiddenState<S> lstm_cell_step(const ConstLayerView<S>& layer,
                              const Vector<S>& x, const HiddenState<S>& prev) {
  const Index h = layer.hidden_size();
  if (x.size() != layer.input_size() || prev.h.size() != h ||
      prev.c.size() != h) {
    throw ContractViolation("lstm_cell_step: shape mismatch");
  }
  Vector<S> gates = layer.w_input * x + layer.w_recurrent * prev.h + layer.bias;
  activate(gates.block(0, 0, 4 * h, 1), h);
  HiddenState<S> next;
  next.c = (gates.segment(h, h).array() * prev.c.array() +
            gates.segment(0, h).array() * gates.segment(2 * h, h).array())
               .matrix();
  next.h = (gates.segment(3 * h, h).array() * next.c.array().tanh()).matrix();
  return next;
}

template <typename S>
SequenceBatch<S> SequenceBatch<S>::pack(
    std::span<const FeatureSequence* const> sequences) {
  SequenceBatch<S> out;
  out.batch = static_cast<Index>(sequences.size());
  if (sequences.empty()) return out;
  out.dim = sequences.front()->dim();
  for (const auto* s : sequences) {
    if (s->dim() != out.dim) {
      throw ContractViolation("sequences in a batch differ in dimension");
    }
    if (s->length() < 1) throw ContractViolation("empty sequence in batch");
    out.lengths.push_back(s->length());
    out.max_length = std::max(out.max_length, s->length());
  }
  out.frames = Matrix<S>::Zero(out.dim, out.max_length * out.batch);
  out.mask = Matrix<S>::Zero(out.max_length, out.batch);
  for (Index b = 0; b < out.batch; ++b) {
    const auto& f = sequences[static_cast<std::size_t>(b)]->frames;
    for (Index t = 0; t < f.rows(); ++t) {
      out.frames.col(t * out.batch + b) = f.row(t).transpose().template cast<S>();
      out.mask(t, b) = S(1);
    }
  }
  return out;
}

template <typename S>
Index SequenceBatch<S>::padding_frames() const {
  return max_length * batch -
         std::accumulate(lengths.begin(), lengths.end(), Index{0});
}

template <typename S>
PaddedBatch<S> make_padded_batch(std::span<const ExampleView> examples) {
  std::vector<const FeatureSequence*> centers;
  std::vector<const FeatureSequence*> targets;
  PaddedBatch<S> batch;
  for (std::size_t e = 0; e < examples.size(); ++e) {
    const auto& ex = examples[e];
    if (ex.center == nullptr) throw ContractViolation("example without center");
    centers.push_back(ex.center);
    batch.first_target.push_back(static_cast<Index>(targets.size()));
    for (const auto* t : ex.targets) {
      targets.push_back(t);
      batch.target_owner.push_back(static_cast<Index>(e));
    }
  }
  batch.first_target.push_back(static_cast<Index>(targets.size()));
  batch.centers = SequenceBatch<S>::pack(centers);
  batch.targets = SequenceBatch<S>::pack(targets);
  if (!targets.empty() && batch.targets.dim != batch.centers.dim) {
    throw ContractViolation("target and center dimensions differ");
  }
  return batch;
}

template <typename S>
Matrix<S> encode_batch(const ModelParams<S>& params,
                       const SequenceBatch<S>& sequences) {
  if (sequences.batch == 0) {
    return Matrix<S>(params.config().hidden_size, 0);
  }
  auto traces = encoder_forward(params, sequences);
  return final_states(traces.back(), sequences);
}

template <typename S>
Vector<S> encode(const ModelParams<S>& params, const FeatureSequence& x) {
  const FeatureSequence* one[] = {&x};
  return encode_batch(params, SequenceBatch<S>::pack(one)).col(0);
}

template <typename S>
FeatureMatrix decode_target(const ModelParams<S>& params, const Vector<S>& z,
                            const FeatureSequence& target,
                            bool teacher_forcing) {
  if (z.size() != params.config().hidden_size) {
    throw ContractViolation("embedding size does not match decoder");
  }
  if (target.length() < 1) throw ContractViolation("empty decode target");
  check_dims(params, target.dim(), "target segment");
  const FeatureSequence* one[] = {&target};
  auto targets = SequenceBatch<S>::pack(one);
  DecoderTrace<S> tr;
  decoder_forward(params, Matrix<S>(z), targets, teacher_forcing, tr);
  return tr.outputs.transpose().template cast<double>();
}

template <typename S>
S batch_loss(const ModelParams<S>& params, const PaddedBatch<S>& batch,
             std::vector<S>* per_target) {
  if (batch.targets.batch == 0) return S(0);
  check_dims(params, batch.targets.dim, "target segment");
  const Matrix<S> z = encode_batch(params, batch.centers);
  DecoderTrace<S> tr;
  decoder_forward(params, gather_initial_states(z, batch), batch.targets,
                  params.config().teacher_forcing, tr);
  auto r = residual(params, tr, batch.targets);
  if (per_target != nullptr) {
    per_target->insert(per_target->end(), r.per_target.begin(),
                       r.per_target.end());
  }
  return r.total;
}

template <typename S>
S accumulate_gradient(const ModelParams<S>& params, const PaddedBatch<S>& batch,
                      ModelParams<S>& grad) {
  if (grad.size() != params.size() || !(grad.config() == params.config())) {
    throw ContractViolation("gradient buffer layout does not match params");
  }
  if (batch.targets.batch == 0) return S(0);
  check_dims(params, batch.targets.dim, "target segment");
  const auto& centers = batch.centers;
  const Index steps = centers.max_length;
  const Index nb = centers.batch;
  const bool teacher = params.config().teacher_forcing;

  auto enc = encoder_forward(params, centers);
  const Matrix<S> z = final_states(enc.back(), centers);
  DecoderTrace<S> dec;
  decoder_forward(params, gather_initial_states(z, batch), batch.targets,
                  teacher, dec);
  auto r = residual(params, dec, batch.targets);

  // Decoder and projection.
  const auto dlayer = params.decoder();
  const auto proj = params.projection();
  const Index cols = batch.targets.batch;
  const Index tsteps = batch.targets.max_length;
  Matrix<S> dy = r.diff;
  for (Index t = 0; t < tsteps; ++t) {
    dy.middleCols(t * cols, cols) *= S(2);
    dy.middleCols(t * cols, cols).array().rowwise() *=
        r.weights.transpose().array();
  }
  Matrix<S> dpre;
  Matrix<S> dh0;
  backward_layer(
      dlayer, dec.layer, tsteps, cols,
      [&](Index t) { return proj.transpose() * dy.middleCols(t * cols, cols); },
      [&](Index t, const auto& dp) {
        if (!teacher && t > 0) {
          dy.middleCols((t - 1) * cols, cols).noalias() +=
              dlayer.w_input.transpose() * dp;
        }
      },
      dpre, dh0);
  {
    auto gdec = grad.decoder();
    accumulate_layer_grads(gdec, dpre, dec.inputs, dec.layer, tsteps, cols,
                           &dec.h0);
    grad.projection().noalias() += dy * dec.layer.hidden.transpose();
    grad.projection_bias() += dy.rowwise().sum();
  }

  // Gradient reaching each embedding is the sum over its targets.
  Matrix<S> dz = Matrix<S>::Zero(z.rows(), nb);
  for (Index c = 0; c < cols; ++c) {
    dz.col(batch.target_owner[static_cast<std::size_t>(c)]) += dh0.col(c);
  }

  // Encoder, top layer first.
  Matrix<S> dh_out = Matrix<S>::Zero(z.rows(), steps * nb);
  for (Index b = 0; b < nb; ++b) {
    dh_out.col((centers.lengths[static_cast<std::size_t>(b)] - 1) * nb + b) =
        dz.col(b);
  }
  for (int l = params.num_encoder_layers() - 1; l >= 0; --l) {
    const auto layer = params.encoder_layer(l);
    const auto& tr = enc[static_cast<std::size_t>(l)];
    const Matrix<S>& in =
        l == 0 ? centers.frames : enc[static_cast<std::size_t>(l - 1)].hidden;
    backward_layer(
        layer, tr, steps, nb,
        [&](Index t) { return dh_out.middleCols(t * nb, nb); },
        [](Index, const auto&) {}, dpre, dh0);
    auto glayer = grad.encoder_layer(l);
    accumulate_layer_grads(glayer, dpre, in, tr, steps, nb,
                           static_cast<const Matrix<S>*>(nullptr));
    if (l > 0) dh_out.noalias() = layer.w_input.transpose() * dpre;
  }
  return r.total;
}

template <typename S>
LossBreakdown<S> skipgram_loss(const ModelParams<S>& params,
                               const ExampleView& example) {
  auto batch = make_padded_batch<S>(std::span<const ExampleView>(&example, 1));
  LossBreakdown<S> out;
  out.total = batch_loss(params, batch, &out.per_target);
  return out;
}

template <typename S>
void check_finite_gradient(const ModelParams<S>& params,
                           const Vector<S>& gradient) {
  for (Index i = 0; i < gradient.size(); ++i) {
    if (!std::isfinite(gradient(i))) {
      throw NumericalError("non-finite gradient at " + params.describe(i));
    }
  }
}

template <typename S>
GradientResult<S> skipgram_gradient(const ModelParams<S>& params,
                                    const ExampleView& example) {
  auto batch = make_padded_batch<S>(std::span<const ExampleView>(&example, 1));
  ModelParams<S> grad(params.config());
  GradientResult<S> out;
  out.loss = accumulate_gradient(params, batch, grad);
  if (!std::isfinite(out.loss)) throw NumericalError("non-finite loss");
  check_finite_gradient(params, grad.flat());
  out.gradient = std::move(grad.flat());
  return out;
}

FiniteDifferenceReport finite_difference_check(
    const ModelParams<double>& params, const ExampleView& example,
    double epsilon, const Eigen::VectorXd& analytic,
    std::optional<std::size_t> sample, std::uint64_t sample_seed) {
  if (analytic.size() != params.size()) {
    throw ContractViolation("analytic gradient has the wrong length");
  }
  std::vector<Index> indices(static_cast<std::size_t>(params.size()));
  std::iota(indices.begin(), indices.end(), Index{0});
  if (sample && *sample < indices.size()) {
    std::mt19937_64 rng(sample_seed);
    std::shuffle(indices.begin(), indices.end(), rng);
    indices.resize(*sample);
    std::sort(indices.begin(), indices.end());
  }
  auto probe = params;
  FiniteDifferenceReport report;
  for (auto j : indices) {
    const double original = probe.flat()(j);
    probe.flat()(j) = original + epsilon;
    const double plus = skipgram_loss(probe, example).total;
    probe.flat()(j) = original - epsilon;
    const double minus = skipgram_loss(probe, example).total;
    probe.flat()(j) = original;
    const double numeric = (plus - minus) / (2 * epsilon);
    const double a = analytic(j);
    const double rel =
        std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
    ++report.checked;
    if (rel > report.max_relative_error || report.worst_index < 0) {
      report.max_relative_error = rel;
      report.worst_index = j;
      report.analytic_at_worst = a;
      report.numeric_at_worst = numeric;
    }
  }
  if (report.worst_index >= 0) {
    report.worst_parameter = params.describe(report.worst_index);
  }
  return report;
}

FiniteDifferenceReport finite_difference_check(
    const ModelParams<double>& params, const ExampleView& example,
    double epsilon, std::optional<std::size_t> sample,
    std::uint64_t sample_seed) {
  const auto g = skipgram_gradient(params, example);
  return finite_difference_check(params, example, epsilon, g.gradient, sample,
                                 sample_seed);
}

#define SPOKENVEC_INSTANTIATE(S)                                              \
  template HiddenState<S> lstm_cell_step<S>(const ConstLayerView<S>&,         \
                                            const Vector<S>&,                 \
                                            const HiddenState<S>&);           \
  template struct SequenceBatch<S>;                                           \
  template PaddedBatch<S> make_padded_batch<S>(std::span<const ExampleView>); \
  template Matrix<S> encode_batch<S>(const ModelParams<S>&,                   \
                                     const SequenceBatch<S>&);                \
  template Vector<S> encode<S>(const ModelParams<S>&, const FeatureSequence&); \
  template FeatureMatrix decode_target<S>(const ModelParams<S>&,              \
                                          const Vector<S>&,                   \
                                          const FeatureSequence&, bool);      \
  template LossBreakdown<S> skipgram_loss<S>(const ModelParams<S>&,           \
                                             const ExampleView&);             \
  template S batch_loss<S>(const ModelParams<S>&, const PaddedBatch<S>&,      \
                           std::vector<S>*);                                  \
  template S accumulate_gradient<S>(const ModelParams<S>&,                    \
                                    const PaddedBatch<S>&, ModelParams<S>&);  \
  template void check_finite_gradient<S>(const ModelParams<S>&,               \
                                         const Vector<S>&);                   \
  template GradientResult<S> skipgram_gradient<S>(const ModelParams<S>&,      \
                                                  const ExampleView&);

SPOKENVEC_INSTANTIATE(float)
SPOKENVEC_INSTANTIATE(double)

#undef SPOKENVEC_INSTANTIATE

}  // namespace spokenvec::nn
