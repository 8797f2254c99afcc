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

#include "spokenvec/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include "spokenvec/binary_io.hpp"
#include "spokenvec/error.hpp"

namespace spokenvec::dsp {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

std::uint16_t get_u16(io::ByteReader& r, const char* field) {
  auto raw = r.take(2, field);
  return static_cast<std::uint16_t>(static_cast<unsigned char>(raw[0]) |
                                    (static_cast<unsigned char>(raw[1]) << 8));
}

FmtChunk parse_fmt(std::string_view body) {
  io::ByteReader r(body);
  FmtChunk fmt;
  fmt.format = get_u16(r, "fmt format");
  fmt.channels = get_u16(r, "fmt channels");
  fmt.sample_rate = r.get_u32("fmt sample rate");
  r.get_u32("fmt byte rate");
  get_u16(r, "fmt block align");
  fmt.bits = get_u16(r, "fmt bits per sample");
  if (fmt.format == kFormatExtensible) {
    get_u16(r, "fmt extension size");
    get_u16(r, "fmt valid bits");
    r.get_u32("fmt channel mask");
    // The first two bytes of the subformat GUID carry the real format tag.
    fmt.format = get_u16(r, "fmt subformat");
  }
  return fmt;
}

}  // namespace

Waveform parse_wav(std::string_view bytes) {
  io::ByteReader r(bytes);
  if (r.take(4, "RIFF tag") != "RIFF") throw FormatError("not a RIFF file");
  r.get_u32("RIFF size");
  if (r.take(4, "WAVE tag") != "WAVE") throw FormatError("not a WAVE file");

  std::optional<FmtChunk> fmt;
  std::optional<std::string_view> data;
  while (r.remaining() >= 8 && !(fmt && data)) {
    auto id = r.take(4, "chunk id");
    auto size = r.get_u32("chunk size");
    if (size > r.remaining()) {
      // Streaming writers sometimes leave the data size unset; take the rest.
      if (id != "data") throw CorruptionError("chunk extends past end of file");
      size = static_cast<std::uint32_t>(r.remaining());
    }
    auto body = r.take(size, "chunk body");
    if (size % 2 == 1 && r.remaining() > 0) r.take(1, "chunk padding");
    if (id == "fmt ") {
      fmt = parse_fmt(body);
    } else if (id == "data") {
      data = body;
    }
  }
  if (!fmt) throw FormatError("missing fmt chunk");
  if (!data) throw FormatError("missing data chunk");
  if (fmt->channels != 1) {
    throw FormatError("expected mono audio, got " +
                      std::to_string(fmt->channels) + " channels");
  }
  if (fmt->sample_rate == 0) throw FormatError("sample rate is zero");

  Waveform wave;
  wave.sample_rate = static_cast<int>(fmt->sample_rate);
  io::ByteReader payload(*data);
  if (fmt->format == kFormatPcm && fmt->bits == 16) {
    wave.samples.resize(data->size() / 2);
    for (auto& s : wave.samples) {
      auto v = static_cast<std::int16_t>(get_u16(payload, "pcm16 sample"));
      s = v / 32768.0;
    }
  } else if (fmt->format == kFormatFloat && fmt->bits == 32) {
    wave.samples.resize(data->size() / 4);
    for (auto& s : wave.samples) s = payload.get_f32("float32 sample");
  } else {
    throw FormatError("unsupported sample format (tag " +
                      std::to_string(fmt->format) + ", " +
                      std::to_string(fmt->bits) +
                      " bits); expected PCM16 or float32");
  }
  return wave;
}

Waveform read_wav(const std::filesystem::path& path) {
  try {
    return parse_wav(io::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string encode_wav(const Waveform& wave, WavEncoding encoding) {
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint16_t tag =
      encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat;
  const auto data_bytes =
      static_cast<std::uint32_t>(wave.samples.size() * (bits / 8));
  auto put_u16 = [](io::ByteWriter& w, std::uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xff),
                       static_cast<char>(v >> 8)};
    w.put_bytes(std::string_view(b, 2));
  };
  io::ByteWriter w;
  w.put_bytes("RIFF");
  w.put_u32(36 + data_bytes);
  w.put_bytes("WAVE");
  w.put_bytes("fmt ");
  w.put_u32(16);
  put_u16(w, tag);
  put_u16(w, 1);
  w.put_u32(static_cast<std::uint32_t>(wave.sample_rate));
  w.put_u32(static_cast<std::uint32_t>(wave.sample_rate) * (bits / 8));
  put_u16(w, static_cast<std::uint16_t>(bits / 8));
  put_u16(w, bits);
  w.put_bytes("data");
  w.put_u32(data_bytes);
  for (double s : wave.samples) {
    if (encoding == WavEncoding::kPcm16) {
      auto q = std::lround(std::clamp(s, -1.0, 1.0) * 32767.0);
      put_u16(w, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      w.put_f32(static_cast<float>(s));
    }
  }
  return w.bytes();
}

void write_wav(const std::filesystem::path& path, const Waveform& wave,
               WavEncoding encoding) {
  io::write_file_atomic(path, encode_wav(wave, encoding));
}

}  // namespace spokenvec::dsp
