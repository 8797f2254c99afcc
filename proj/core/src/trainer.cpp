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

#include "spokenvec/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "spokenvec/parallel.hpp"

namespace spokenvec::train {

std::string to_string(Precision p) {
  return p == Precision::kF32 ? "f32" : "f64";
}

Precision parse_precision(std::string_view s) {
  if (s == "f32") return Precision::kF32;
  if (s == "f64") return Precision::kF64;
  throw ConfigError("precision must be f32 or f64, got '" + std::string(s) +
                    "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be a finite value >= 0");
  }
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (grad_clip_norm && !(*grad_clip_norm > 0)) {
    throw ConfigError("grad_clip_norm must be positive (or none)");
  }
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

template <typename S>
TrainState<S> initial_state(const nn::ModelConfig& model,
                            const TrainConfig& config,
                            corpus::NormalizationStats normalization) {
  config.validate();
  TrainState<S> state;
  state.params = nn::init_params<S>(model, config.seed);
  state.normalization = std::move(normalization);
  state.rng.seed(config.seed);
  state.model = model;
  state.config = config;
  return state;
}

std::vector<std::vector<std::size_t>> plan_batches(
    std::span<const std::size_t> order,
    std::span<const Eigen::Index> center_lengths, int batch_size) {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  std::vector<std::size_t> sorted(order.begin(), order.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](std::size_t a, std::size_t b) {
                     return center_lengths[a] < center_lengths[b];
                   });
  std::vector<std::vector<std::size_t>> batches;
  const auto bs = static_cast<std::size_t>(batch_size);
  for (std::size_t i = 0; i < sorted.size(); i += bs) {
    batches.emplace_back(sorted.begin() + static_cast<std::ptrdiff_t>(i),
                         sorted.begin() + static_cast<std::ptrdiff_t>(
                                              std::min(sorted.size(), i + bs)));
  }
  return batches;
}

namespace {

std::vector<Eigen::Index> center_lengths(
    std::span<const nn::ExampleView> examples) {
  std::vector<Eigen::Index> lengths;
  lengths.reserve(examples.size());
  for (const auto& e : examples) lengths.push_back(e.center->length());
  return lengths;
}

template <typename S>
nn::PaddedBatch<S> gather_batch(std::span<const nn::ExampleView> examples,
                                std::span<const std::size_t> ids) {
  std::vector<nn::ExampleView> picked;
  picked.reserve(ids.size());
  for (auto i : ids) picked.push_back(examples[i]);
  return nn::make_padded_batch<S>(picked);
}

// Sum of per-example gradients over `ids` written into `grad`; returns the
// summed loss. Work is split into at most `threads` contiguous parts whose
// results are added in part order.
template <typename S>
S batch_gradient(const nn::ModelParams<S>& params,
                 std::span<const nn::ExampleView> examples,
                 std::span<const std::size_t> ids, int threads,
                 nn::ModelParams<S>& grad) {
  grad.flat().setZero();
  const auto parts = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(1, threads)), ids.size());
  if (parts <= 1) {
    return nn::accumulate_gradient(params, gather_batch<S>(examples, ids), grad);
  }
  std::vector<nn::ModelParams<S>> partial(parts,
                                          nn::ModelParams<S>(params.config()));
  std::vector<S> losses(parts, S(0));
  parallel_for(parts, threads, [&](std::size_t p) {
    const auto lo = p * ids.size() / parts;
    const auto hi = (p + 1) * ids.size() / parts;
    losses[p] = nn::accumulate_gradient(
        params, gather_batch<S>(examples, ids.subspan(lo, hi - lo)), partial[p]);
  });
  S loss = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    grad.flat() += partial[p].flat();
    loss += losses[p];
  }
  return loss;
}

}  // namespace

template <typename S>
std::vector<nn::PaddedBatch<S>> batch_examples(
    std::span<const nn::ExampleView> examples, int batch_size) {
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto lengths = center_lengths(examples);
  std::vector<nn::PaddedBatch<S>> out;
  for (const auto& ids : plan_batches(order, lengths, batch_size)) {
    out.push_back(gather_batch<S>(examples, ids));
  }
  return out;
}

template <typename S>
double clip_global_norm(nn::Vector<S>& g, double max_norm) {
  const double norm = static_cast<double>(g.norm());
  if (norm > max_norm) g *= static_cast<S>(max_norm / norm);
  return norm;
}

template <typename S>
TrainState<S> train(std::span<const nn::ExampleView> examples,
                    TrainState<S> state, const TrainHooks<S>& hooks) {
  const auto& cfg = state.config;
  cfg.validate();
  if (examples.empty()) throw InputError("training needs at least one example");
  const auto lengths = center_lengths(examples);
  nn::ModelParams<S> grad(state.params.config());
  nn::Vector<S> step(state.params.size());

  for (int epoch = state.epoch + 1; epoch <= cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), state.rng);
    auto batches = plan_batches(order, lengths, cfg.batch_size);
    std::shuffle(batches.begin(), batches.end(), state.rng);

    double loss_sum = 0;
    for (const auto& ids : batches) {
      const S loss =
          batch_gradient(state.params, examples, ids, cfg.threads, grad);
      if (!std::isfinite(loss)) {
        throw TrainingDiverged(
            "non-finite loss in epoch " + std::to_string(epoch), epoch);
      }
      step = grad.flat() / static_cast<S>(ids.size());
      if (!step.allFinite()) {
        try {
          nn::check_finite_gradient(state.params, step);
        } catch (const NumericalError& e) {
          throw TrainingDiverged(std::string(e.what()) + " in epoch " +
                                     std::to_string(epoch),
                                 epoch);
        }
      }
      if (cfg.grad_clip_norm) clip_global_norm(step, *cfg.grad_clip_norm);
      state.params.flat().noalias() -= static_cast<S>(cfg.learning_rate) * step;
      loss_sum += static_cast<double>(loss);
    }

    state.epoch = epoch;
    state.running_loss = loss_sum / static_cast<double>(examples.size());
    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = state.running_loss;
    stats.steps = batches.size();
    stats.wall_seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    if (hooks.on_epoch) hooks.on_epoch(stats);
    if (hooks.on_state) hooks.on_state(state);
  }
  return state;
}

std::vector<nn::ExampleView> example_views(
    std::span<const corpus::SkipGramExample> examples,
    std::span<const corpus::WordSegment> segments) {
  std::vector<nn::ExampleView> views;
  views.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.center >= segments.size()) {
      throw ContractViolation("example refers to a missing segment");
    }
    nn::ExampleView v;
    v.center = &segments[ex.center].features;
    for (const auto& t : ex.targets) {
      if (t.segment >= segments.size()) {
        throw ContractViolation("example refers to a missing segment");
      }
      v.targets.push_back(&segments[t.segment].features);
    }
    views.push_back(std::move(v));
  }
  return views;
}

#define SPOKENVEC_INSTANTIATE(S)                                              \
  template TrainState<S> initial_state<S>(const nn::ModelConfig&,             \
                                          const TrainConfig&,                 \
                                          corpus::NormalizationStats);        \
  template std::vector<nn::PaddedBatch<S>> batch_examples<S>(                 \
      std::span<const nn::ExampleView>, int);                                 \
  template double clip_global_norm<S>(nn::Vector<S>&, double);                \
  template TrainState<S> train<S>(std::span<const nn::ExampleView>,           \
                                  TrainState<S>, const TrainHooks<S>&);

SPOKENVEC_INSTANTIATE(float)
SPOKENVEC_INSTANTIATE(double)

#undef SPOKENVEC_INSTANTIATE

}  // namespace spokenvec::train
