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

#ifndef SPOKENVEC_TRAINER_HPP_
#define SPOKENVEC_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "spokenvec/corpus.hpp"
#include "spokenvec/error.hpp"
#include "spokenvec/model.hpp"
#include "spokenvec/seq2seq.hpp"

namespace spokenvec::train {

enum class Precision { kF32, kF64 };

std::string to_string(Precision p);
Precision parse_precision(std::string_view s);

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 500;
  int k = 5;
  int batch_size = 32;
  std::optional<double> grad_clip_norm = 5.0;
  std::uint64_t seed = 0;
  Precision precision = Precision::kF32;
  // Workers used for per-example gradients inside a batch. With a fixed
  // thread count the reduction order is fixed, so runs are reproducible.
  int threads = 1;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

template <typename Scalar>
struct TrainState {
  nn::ModelParams<Scalar> params;
  corpus::NormalizationStats normalization;
  int epoch = 0;  // completed epochs
  double running_loss = 0;
  std::mt19937_64 rng;
  nn::ModelConfig model;
  TrainConfig config;
};

// Fresh state: parameters from init_params(model, config.seed) and an RNG
// seeded from the same seed for shuffling.
template <typename Scalar>
TrainState<Scalar> initial_state(const nn::ModelConfig& model,
                                 const TrainConfig& config,
                                 corpus::NormalizationStats normalization);

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0;  // mean per-example loss before each update
  double wall_seconds = 0;
  std::size_t steps = 0;
};

template <typename Scalar>
struct TrainHooks {
  std::function<void(const EpochStats&)> on_epoch;
  // Called after each completed epoch with the updated state.
  std::function<void(const TrainState<Scalar>&)> on_state;
};

// Raised when the loss or gradient stops being finite. The state handed to
// hooks before the failure is the last good one.
class TrainingDiverged : public NumericalError {
 public:
  TrainingDiverged(const std::string& what, int epoch)
      : NumericalError(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

// Groups example indices into batches: `order` is stably sorted by center
// length (so equal lengths keep their relative order) and cut into
// consecutive runs of batch_size. Every index appears in exactly one batch.
std::vector<std::vector<std::size_t>> plan_batches(
    std::span<const std::size_t> order,
    std::span<const Eigen::Index> center_lengths, int batch_size);

template <typename Scalar>
std::vector<nn::PaddedBatch<Scalar>> batch_examples(
    std::span<const nn::ExampleView> examples, int batch_size);

// Rescales `g` in place so its L2 norm is at most max_norm; returns the
// norm before clipping.
template <typename Scalar>
double clip_global_norm(nn::Vector<Scalar>& g, double max_norm);

// Runs epochs state.epoch + 1 .. config.epochs. Each epoch shuffles the
// examples with state.rng, buckets them by center length into batches,
// shuffles the batch order, and for every batch applies
// params -= lr * clip(mean per-example gradient).
template <typename Scalar>
TrainState<Scalar> train(std::span<const nn::ExampleView> examples,
                         TrainState<Scalar> state,
                         const TrainHooks<Scalar>& hooks = {});

// Resolves skip-gram examples against (already normalized) segments.
std::vector<nn::ExampleView> example_views(
    std::span<const corpus::SkipGramExample> examples,
    std::span<const corpus::WordSegment> segments);

// Checkpoint file: "A2VC", u32 version, u32-length-prefixed key=value config
// block (model, training config, epoch, running loss), normalization stats
// (u32 d, d f64 means, d f64 stddevs), u64 parameter count, the flat
// parameters as f32 or f64 per the stored precision, and the u32-length-
// prefixed textual RNG state. Little-endian throughout.
inline constexpr char kCheckpointMagic[4] = {'A', '2', 'V', 'C'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointInfo {
  Precision stored_precision = Precision::kF64;
  bool converted = false;  // stored precision differs from the requested one
};

template <typename Scalar>
std::string encode_checkpoint(const TrainState<Scalar>& state);
template <typename Scalar>
TrainState<Scalar> decode_checkpoint(std::string_view bytes,
                                     CheckpointInfo* info = nullptr);

template <typename Scalar>
void save_checkpoint(const TrainState<Scalar>& state,
                     const std::filesystem::path& path);
template <typename Scalar>
TrainState<Scalar> load_checkpoint(const std::filesystem::path& path,
                                   CheckpointInfo* info = nullptr);

Precision checkpoint_precision(const std::filesystem::path& path);

// key = value lines describing both configs, in a fixed key order.
std::string format_config(const nn::ModelConfig& model,
                          const TrainConfig& config);

}  // namespace spokenvec::train

#endif  // SPOKENVEC_TRAINER_HPP_
