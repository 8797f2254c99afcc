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


#include <cstring>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "spokenvec/binary_io.hpp"
#include "spokenvec/features.hpp"
#include "spokenvec/text.hpp"
#include "spokenvec/wav.hpp"

using namespace spokenvec;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("spokenvec_test_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string le32(std::uint32_t v) {
  io::ByteWriter w;
  w.put_u32(v);
  return w.bytes();
}

std::string le16(std::uint16_t v) {
  return std::string{static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
}

// Hand-assembled RIFF file so the parser is not only tested against its own
// encoder.
std::string riff(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                 std::uint16_t bits, const std::string& data,
                 const std::string& extra_chunk = {}) {
  std::string fmt = le16(format) + le16(channels) + le32(rate) +
                    le32(rate * channels * bits / 8) +
                    le16(static_cast<std::uint16_t>(channels * bits / 8)) + le16(bits);
  std::string body = "WAVE";
  body += "fmt " + le32(static_cast<std::uint32_t>(fmt.size())) + fmt;
  body += extra_chunk;
  body += "data" + le32(static_cast<std::uint32_t>(data.size())) + data;
  return "RIFF" + le32(static_cast<std::uint32_t>(body.size())) + body;
}

}  // namespace

TEST_CASE("byte writer and reader round-trip little-endian values") {
  io::ByteWriter w;
  w.put_u32(0x01020304u);
  w.put_u64(0x0102030405060708ull);
  w.put_f32(1.5f);
  w.put_f64(-2.25);
  w.put_string("abc");
  CHECK(w.bytes().substr(0, 4) == std::string("\x04\x03\x02\x01", 4));

  io::ByteReader r(w.bytes());
  CHECK(r.get_u32("a") == 0x01020304u);
  CHECK(r.get_u64("b") == 0x0102030405060708ull);
  CHECK(r.get_f32("c") == 1.5f);
  CHECK(r.get_f64("d") == -2.25);
  CHECK(r.get_string("e") == "abc");
  CHECK(r.remaining() == 0);
  CHECK_THROWS_AS(r.get_u32("past end"), CorruptionError);
}

TEST_CASE("text helpers") {
  CHECK(text::trim("  a b \t") == "a b");
  CHECK(text::split("a\t\tb", '\t').size() == 3);
  CHECK(text::split_whitespace("  x  y\tz ").size() == 3);
  CHECK(text::to_lower("AbC") == "abc");
  CHECK(text::parse_double("7.35") == 7.35);
  CHECK(text::parse_double("+1e-3") == 1e-3);
  CHECK_FALSE(text::parse_double("1.0x"));
  CHECK_FALSE(text::parse_double(""));
  CHECK(text::parse_size("42") == 42u);
  CHECK_FALSE(text::parse_size("-1"));
}

TEST_CASE("feature cache layout is bit-exact") {
  FeatureSequence f;
  f.frames.resize(2, 3);
  f.frames << 1, 2, 3, 4, 5, 6;
  const auto bytes = dsp::encode_feature_cache(f);
  REQUIRE(bytes.size() == 16 + 6 * 4);
  CHECK(bytes.substr(0, 4) == "A2VF");
  CHECK(bytes.substr(4, 4) == le32(1));
  CHECK(bytes.substr(8, 4) == le32(2));
  CHECK(bytes.substr(12, 4) == le32(3));
  // row-major: the second value stored is frame 0, coefficient 1
  float second = 0;
  std::memcpy(&second, bytes.data() + 20, 4);
  CHECK(second == 2.0f);

  const auto back = dsp::decode_feature_cache(bytes);
  CHECK(back.frames == f.frames);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(dsp::decode_feature_cache(bad_magic), FormatError);
  auto bad_version = bytes;
  bad_version.replace(4, 4, le32(2));
  CHECK_THROWS_AS(dsp::decode_feature_cache(bad_version), FormatError);
  CHECK_THROWS_AS(dsp::decode_feature_cache(bytes.substr(0, bytes.size() - 1)),
                  CorruptionError);
  CHECK_THROWS_AS(dsp::decode_feature_cache(bytes + "x"), CorruptionError);
}

TEST_CASE("feature cache files round-trip at float32 precision") {
  const auto dir = scratch_dir("cache");
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  FeatureSequence f;
  f.frames.resize(7, 13);
  for (Eigen::Index i = 0; i < f.frames.size(); ++i) f.frames.data()[i] = normal(rng);
  dsp::write_feature_cache(dir / "u.a2vf", f);
  const auto back = dsp::read_feature_cache(dir / "u.a2vf");
  CHECK(back.frames == f.frames.cast<float>().cast<double>());
  CHECK_THROWS_AS(dsp::read_feature_cache(dir / "missing.a2vf"), InputError);
}

TEST_CASE("PCM16 and float32 WAV parsing") {
  std::string pcm = le16(0) + le16(16384) + le16(static_cast<std::uint16_t>(-32768));
  auto w = dsp::parse_wav(riff(1, 1, 8000, 16, pcm));
  CHECK(w.sample_rate == 8000);
  REQUIRE(w.samples.size() == 3);
  CHECK(w.samples[0] == 0.0);
  CHECK(w.samples[1] == 0.5);
  CHECK(w.samples[2] == -1.0);

  io::ByteWriter fw;
  fw.put_f32(0.25f);
  fw.put_f32(-0.75f);
  w = dsp::parse_wav(riff(3, 1, 16000, 32, fw.bytes()));
  REQUIRE(w.samples.size() == 2);
  CHECK(w.samples[1] == -0.75);

  // An unknown chunk with odd size (plus pad byte) before the data chunk.
  const std::string list = "LIST" + le32(3) + std::string("abc") + std::string(1, '\0');
  w = dsp::parse_wav(riff(1, 1, 16000, 16, pcm, list));
  CHECK(w.samples.size() == 3);
}

TEST_CASE("unsupported or broken WAV files are rejected") {
  const std::string pcm = le16(1) + le16(2);
  CHECK_THROWS_AS(dsp::parse_wav(riff(1, 2, 16000, 16, pcm)), FormatError);
  CHECK_THROWS_AS(dsp::parse_wav(riff(1, 1, 16000, 8, "ab")), FormatError);
  CHECK_THROWS_AS(dsp::parse_wav(riff(6, 1, 16000, 8, "ab")), FormatError);
  CHECK_THROWS_AS(dsp::parse_wav("RIFX0000WAVE"), FormatError);
  CHECK_THROWS_AS(dsp::parse_wav(""), FormatError);
  auto truncated = riff(1, 1, 16000, 16, pcm);
  CHECK_THROWS_AS(dsp::parse_wav(truncated.substr(0, 30)), FormatError);
}

TEST_CASE("WAV encode/parse round-trip") {
  dsp::Waveform w;
  w.sample_rate = 22050;
  for (int i = 0; i < 100; ++i) w.samples.push_back((i % 7) / 8.0 - 0.4);
  const auto f32 = dsp::parse_wav(dsp::encode_wav(w, dsp::WavEncoding::kFloat32));
  CHECK(f32.sample_rate == 22050);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    CHECK(f32.samples[i] == static_cast<double>(static_cast<float>(w.samples[i])));
  }
  const auto i16 = dsp::parse_wav(dsp::encode_wav(w, dsp::WavEncoding::kPcm16));
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    CHECK(std::abs(i16.samples[i] - w.samples[i]) <= 1.0 / 32768);
  }
  const auto dir = scratch_dir("wav");
  dsp::write_wav(dir / "a.wav", w, dsp::WavEncoding::kPcm16);
  CHECK(dsp::read_wav(dir / "a.wav").samples.size() == 100);
  CHECK_THROWS_AS(dsp::read_wav(dir / "nope.wav"), InputError);
}
