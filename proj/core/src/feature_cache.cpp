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

#include <string>

#include "spokenvec/binary_io.hpp"
#include "spokenvec/error.hpp"
#include "spokenvec/features.hpp"

namespace spokenvec::dsp {

std::string encode_feature_cache(const FeatureSequence& features) {
  io::ByteWriter w;
  w.put_bytes(std::string_view(kFeatureCacheMagic, 4));
  w.put_u32(kFeatureCacheVersion);
  w.put_u32(static_cast<std::uint32_t>(features.length()));
  w.put_u32(static_cast<std::uint32_t>(features.dim()));
  for (Eigen::Index t = 0; t < features.length(); ++t) {
    for (Eigen::Index j = 0; j < features.dim(); ++j) {
      w.put_f32(static_cast<float>(features.frames(t, j)));
    }
  }
  return w.bytes();
}

FeatureSequence decode_feature_cache(std::string_view bytes) {
  io::ByteReader r(bytes);
  if (r.take(4, "magic") != std::string_view(kFeatureCacheMagic, 4)) {
    throw FormatError("not a feature cache (bad magic)");
  }
  auto version = r.get_u32("version");
  if (version != kFeatureCacheVersion) {
    throw FormatError("unsupported feature cache version " +
                      std::to_string(version));
  }
  auto rows = r.get_u32("frame count");
  auto cols = r.get_u32("dimension");
  if (std::uint64_t{rows} * cols * 4 != r.remaining()) {
    throw CorruptionError("feature cache payload size does not match header");
  }
  FeatureSequence out;
  out.frames.resize(rows, cols);
  for (std::uint32_t t = 0; t < rows; ++t) {
    for (std::uint32_t j = 0; j < cols; ++j) {
      out.frames(t, j) = r.get_f32("frame data");
    }
  }
  return out;
}

void write_feature_cache(const std::filesystem::path& path,
                         const FeatureSequence& features) {
  io::write_file_atomic(path, encode_feature_cache(features));
}

FeatureSequence read_feature_cache(const std::filesystem::path& path) {
  return decode_feature_cache(io::read_file(path));
}

}  // namespace spokenvec::dsp
