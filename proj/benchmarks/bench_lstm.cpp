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


#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "spokenvec/seq2seq.hpp"

using namespace spokenvec;

namespace {

struct Workload {
  std::vector<FeatureSequence> sequences;
  std::vector<nn::ExampleView> examples;
};

// `batch` examples, each a center with 2k targets of `length` frames.
Workload make_workload(int batch, int length, int k) {
  Workload w;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  w.sequences.resize(static_cast<std::size_t>(batch * (2 * k + 1)));
  for (auto& s : w.sequences) {
    s.frames = FeatureMatrix(length, 13);
    for (Eigen::Index i = 0; i < s.frames.size(); ++i) s.frames.data()[i] = gauss(rng);
  }
  for (int b = 0; b < batch; ++b) {
    nn::ExampleView v;
    const auto base = static_cast<std::size_t>(b * (2 * k + 1));
    v.center = &w.sequences[base];
    for (int t = 1; t <= 2 * k; ++t) v.targets.push_back(&w.sequences[base + static_cast<std::size_t>(t)]);
    w.examples.push_back(v);
  }
  return w;
}

nn::ModelConfig model(int hidden) {
  nn::ModelConfig m;
  m.hidden_size = hidden;
  return m;
}

}  // namespace

template <typename Scalar>
static void BM_EncodeBatch(benchmark::State& state) {
  const auto w = make_workload(32, 50, 0);
  const auto params = nn::init_params<Scalar>(model(static_cast<int>(state.range(0))), 1);
  std::vector<const FeatureSequence*> ptrs;
  for (const auto& s : w.sequences) ptrs.push_back(&s);
  const auto batch = nn::SequenceBatch<Scalar>::pack(ptrs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::encode_batch(params, batch));
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_EncodeBatch<float>)->Arg(64)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EncodeBatch<double>)->Arg(64)->Arg(300)->Unit(benchmark::kMillisecond);

template <typename Scalar>
static void BM_BatchGradient(benchmark::State& state) {
  const auto w = make_workload(static_cast<int>(state.range(1)), 30, 5);
  const auto params = nn::init_params<Scalar>(model(static_cast<int>(state.range(0))), 1);
  const auto batch = nn::make_padded_batch<Scalar>(w.examples);
  nn::ModelParams<Scalar> grad(params.config());
  for (auto _ : state) {
    grad.flat().setZero();
    benchmark::DoNotOptimize(nn::accumulate_gradient(params, batch, grad));
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_BatchGradient<float>)->Args({64, 8})->Args({300, 32})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchGradient<double>)->Args({64, 8})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
