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

// MFCC front end: pre-emphasis, 25 ms Hamming frames every 10 ms, FFT power
// spectrum, triangular mel filterbank, floored log, orthonormal DCT-II.

#ifndef SPOKENVEC_MFCC_HPP_
#define SPOKENVEC_MFCC_HPP_

#include <cstddef>

#include <Eigen/Core>

#include "spokenvec/features.hpp"
#include "spokenvec/wav.hpp"

namespace spokenvec::dsp {

struct MfccConfig {
  double frame_length = 0.025;  // seconds
  double frame_hop = 0.010;     // seconds
  int num_coefficients = 13;
  int num_mel_filters = 26;
  double pre_emphasis = 0.97;
  // 0 selects the next power of two >= the frame length in samples.
  int fft_size = 0;
  double log_floor = 1e-10;

  int frame_samples(int sample_rate) const;
  int hop_samples(int sample_rate) const;
  int resolved_fft_size(int sample_rate) const;

  // Throws ConfigError when the invariants between the fields do not hold.
  void validate(int sample_rate) const;
};

// 2595 * log10(1 + hz / 700). Throws DomainError for negative input.
double mel_from_hz(double hz);
double hz_from_mel(double mel);

// num_mel_filters x (fft_size / 2 + 1). Row m is a triangle on linear
// frequency whose feet and peak sit at consecutive points of an equal-mel
// grid spanning [0, sample_rate / 2], evaluated at the FFT bin centres.
Eigen::MatrixXd mel_filterbank(const MfccConfig& config, int sample_rate);

// Peak frequencies (Hz) of the filterbank rows, in row order.
Eigen::VectorXd mel_filter_centers(const MfccConfig& config, int sample_rate);

// 1 + floor((num_samples - frame) / hop); zero when the signal is shorter
// than one frame.
std::size_t frame_count(std::size_t num_samples, std::size_t frame,
                        std::size_t hop);

FeatureSequence extract_mfcc(const Waveform& wave, const MfccConfig& config);

}  // namespace spokenvec::dsp

#endif  // SPOKENVEC_MFCC_HPP_
