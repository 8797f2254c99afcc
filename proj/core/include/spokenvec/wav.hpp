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

#ifndef SPOKENVEC_WAV_HPP_
#define SPOKENVEC_WAV_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace spokenvec::dsp {

// Mono audio with amplitudes nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class WavEncoding { kPcm16, kFloat32 };

// Accepts RIFF/WAVE, one channel, either 16-bit integer PCM or 32-bit IEEE
// float (plain or WAVE_FORMAT_EXTENSIBLE). Anything else throws FormatError;
// multi-channel files are rejected, not downmixed.
Waveform parse_wav(std::string_view bytes);
Waveform read_wav(const std::filesystem::path& path);

std::string encode_wav(const Waveform& wave, WavEncoding encoding);
void write_wav(const std::filesystem::path& path, const Waveform& wave,
               WavEncoding encoding);

}  // namespace spokenvec::dsp

#endif  // SPOKENVEC_WAV_HPP_
