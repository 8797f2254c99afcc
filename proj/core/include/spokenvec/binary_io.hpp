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

// Little-endian encoding helpers shared by the feature cache, checkpoint and
// WAV code. All multi-byte values are stored little-endian regardless of host.

#ifndef SPOKENVEC_BINARY_IO_HPP_
#define SPOKENVEC_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>

#include "spokenvec/error.hpp"

namespace spokenvec::io {

class ByteWriter {
 public:
  void put_bytes(std::string_view bytes) { buffer_.append(bytes); }

  void put_u32(std::uint32_t v) { put_le(v, 4); }
  void put_u64(std::uint64_t v) { put_le(v, 8); }
  void put_f32(float v) { put_u32(std::bit_cast<std::uint32_t>(v)); }
  void put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }

  // u32 length followed by the raw bytes.
  void put_string(std::string_view s) {
    put_u32(static_cast<std::uint32_t>(s.size()));
    put_bytes(s);
  }

  const std::string& bytes() const noexcept { return buffer_; }

 private:
  void put_le(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) {
      buffer_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
  }

  std::string buffer_;
};

// Bounds-checked reader; running past the end throws CorruptionError naming
// the field that was being read.
class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::string_view take(std::size_t n, const char* field) {
    if (n > data_.size() - pos_) {
      throw CorruptionError(std::string("truncated input while reading ") +
                            field);
    }
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint32_t get_u32(const char* field) {
    return static_cast<std::uint32_t>(get_le(4, field));
  }
  std::uint64_t get_u64(const char* field) { return get_le(8, field); }
  float get_f32(const char* field) {
    return std::bit_cast<float>(get_u32(field));
  }
  double get_f64(const char* field) {
    return std::bit_cast<double>(get_u64(field));
  }
  std::string get_string(const char* field) {
    auto n = get_u32(field);
    return std::string(take(n, field));
  }

  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }

 private:
  std::uint64_t get_le(int width, const char* field) {
    auto raw = take(static_cast<std::size_t>(width), field);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[i]))
           << (8 * i);
    }
    return v;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view bytes);

}  // namespace spokenvec::io

#endif  // SPOKENVEC_BINARY_IO_HPP_
