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

#include "spokenvec/mfcc.hpp"

using namespace spokenvec;

static void BM_ExtractMfcc(benchmark::State& state) {
  dsp::Waveform wave;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss(0.0, 0.1);
  wave.samples.resize(static_cast<std::size_t>(state.range(0)) * 16000);
  for (auto& s : wave.samples) s = gauss(rng);
  const dsp::MfccConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsp::extract_mfcc(wave, config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.SetLabel("seconds of audio");
}
BENCHMARK(BM_ExtractMfcc)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_Filterbank(benchmark::State& state) {
  const dsp::MfccConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsp::mel_filterbank(config, 16000));
  }
}
BENCHMARK(BM_Filterbank);

BENCHMARK_MAIN();
