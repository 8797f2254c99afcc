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


#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "spokenvec/error.hpp"
#include "spokenvec/mfcc.hpp"
#include "support/signals.hpp"

using namespace spokenvec;
using namespace spokenvec::dsp;

namespace {

FeatureMatrix load_golden(const std::string& name) {
  std::ifstream in(std::string(SPOKENVEC_TEST_DATA_DIR) + "/golden/mfcc_" + name + ".txt");
  REQUIRE(in);
  std::string hash, label;
  int rows = 0, cols = 0;
  in >> hash >> label >> rows >> cols;
  FeatureMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) in >> m(r, c);
  }
  REQUIRE(in);
  return m;
}

}  // namespace

TEST_CASE("mel scale") {
  CHECK(mel_from_hz(0) == 0.0);
  CHECK(mel_from_hz(700) == doctest::Approx(781.17).epsilon(1e-5));
  CHECK(mel_from_hz(8000) == doctest::Approx(2840.023).epsilon(1e-6));
  CHECK(hz_from_mel(mel_from_hz(1234.5)) == doctest::Approx(1234.5).epsilon(1e-12));
  CHECK_THROWS_AS(mel_from_hz(-1), DomainError);
}

TEST_CASE("mel filterbank shape") {
  MfccConfig config;
  const auto bank = mel_filterbank(config, 16000);
  CHECK(bank.rows() == 26);
  CHECK(bank.cols() == 257);
  CHECK(bank.minCoeff() >= 0.0);
  for (Eigen::Index r = 0; r < bank.rows(); ++r) CHECK(bank.row(r).sum() > 0.0);
  const auto centers = mel_filter_centers(config, 16000);
  for (Eigen::Index i = 1; i < centers.size(); ++i) CHECK(centers(i) > centers(i - 1));

  // Peak bins and the first row from the reference implementation.
  Eigen::Index peak = 0;
  bank.row(0).maxCoeff(&peak);
  CHECK(peak == 2);
  bank.row(1).maxCoeff(&peak);
  CHECK(peak == 5);
  CHECK(bank(0, 1) == doctest::Approx(0.45634245).epsilon(1e-7));
  CHECK(bank(0, 3) == doctest::Approx(0.66385671).epsilon(1e-7));

  config.num_mel_filters = 200;
  CHECK_THROWS_AS(mel_filterbank(config, 16000), ConfigError);
}

TEST_CASE("config validation") {
  MfccConfig ok;
  CHECK_NOTHROW(ok.validate(16000));
  CHECK(ok.resolved_fft_size(16000) == 512);
  auto bad = ok;
  bad.num_coefficients = 27;
  CHECK_THROWS_AS(bad.validate(16000), ConfigError);
  bad = ok;
  bad.frame_hop = 0.03;
  CHECK_THROWS_AS(bad.validate(16000), ConfigError);
  bad = ok;
  bad.fft_size = 256;
  CHECK_THROWS_AS(bad.validate(16000), ConfigError);
  bad = ok;
  bad.fft_size = 600;
  CHECK_THROWS_AS(bad.validate(16000), ConfigError);
  bad = ok;
  bad.log_floor = 0;
  CHECK_THROWS_AS(bad.validate(16000), ConfigError);
}

TEST_CASE("frame count") {
  CHECK(frame_count(16000, 400, 160) == 98);
  CHECK(frame_count(400, 400, 160) == 1);
  CHECK(frame_count(399, 400, 160) == 0);
  for (std::size_t len = 400; len < 1200; len += 37) {
    const auto t = frame_count(len, 400, 160);
    CHECK(400 + (t - 1) * 160 <= len);
    CHECK(400 + t * 160 > len);
  }
  const auto one_second = extract_mfcc(testing::sine(440, 0.3, 16000), MfccConfig{});
  CHECK(one_second.length() == 98);
  CHECK(one_second.dim() == 13);
}

TEST_CASE("matches the reference implementation on the golden signals") {
  for (const std::string name : {"zero", "sine1k", "noise"}) {
    const auto expected = load_golden(name);
    const auto got = extract_mfcc(testing::golden_signal(name), MfccConfig{});
    REQUIRE(got.frames.rows() == expected.rows());
    REQUIRE(got.frames.cols() == expected.cols());
    INFO(name);
    CHECK((got.frames - expected).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("zero signal gives the log floor in C0 only") {
  const auto f = extract_mfcc(testing::golden_signal("zero"), MfccConfig{});
  const double c0 = std::sqrt(26.0) * std::log(1e-10);
  for (Eigen::Index t = 0; t < f.length(); ++t) {
    CHECK(f.frames(t, 0) == doctest::Approx(c0).epsilon(1e-12));
    CHECK(f.frames.row(t).tail(12).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("shifting by one hop shifts the frames by one") {
  auto noise = testing::lcg_noise(5000, 99);
  Waveform a, b;
  a.samples.assign(noise.begin(), noise.end() - 160);
  b.samples.assign(noise.begin() + 160, noise.end());
  const auto fa = extract_mfcc(a, MfccConfig{});
  const auto fb = extract_mfcc(b, MfccConfig{});
  REQUIRE(fa.length() == fb.length());
  // Pre-emphasis at the first sample differs, so skip frame 0.
  const auto n = fa.length() - 2;
  CHECK((fa.frames.middleRows(2, n) - fb.frames.middleRows(1, n)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("amplitude scaling only moves C0") {
  Waveform w;
  w.samples = testing::lcg_noise(4000, 5);
  auto louder = w;
  for (auto& s : louder.samples) s *= 3.0;
  const auto a = extract_mfcc(w, MfccConfig{});
  const auto b = extract_mfcc(louder, MfccConfig{});
  CHECK((a.frames.rightCols(12) - b.frames.rightCols(12)).cwiseAbs().maxCoeff() < 1e-6);
  const double shift = std::sqrt(26.0) * std::log(9.0);
  CHECK((b.frames.col(0) - a.frames.col(0)).array().abs().maxCoeff() ==
        doctest::Approx(shift).epsilon(1e-6));
  CHECK(a.all_finite());
}

TEST_CASE("input errors") {
  Waveform shorter;
  shorter.samples.assign(399, 0.1);
  CHECK_THROWS_AS(extract_mfcc(shorter, MfccConfig{}), InputError);
  Waveform bad;
  bad.samples.assign(1000, 0.0);
  bad.samples[10] = std::nan("");
  CHECK_THROWS_AS(extract_mfcc(bad, MfccConfig{}), InputError);
}
