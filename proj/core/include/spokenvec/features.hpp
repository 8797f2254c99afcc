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

#ifndef SPOKENVEC_FEATURES_HPP_
#define SPOKENVEC_FEATURES_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace spokenvec {

// T x d, one acoustic frame per row.
using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A variable-length sequence of acoustic feature frames.
struct FeatureSequence {
  FeatureMatrix frames;

  Eigen::Index length() const noexcept { return frames.rows(); }
  Eigen::Index dim() const noexcept { return frames.cols(); }
  bool all_finite() const { return frames.allFinite(); }
};

namespace dsp {

// Feature cache file: "A2VF", u32 version (1), u32 T, u32 d, then T*d
// float32 values, row-major, all little-endian.
inline constexpr char kFeatureCacheMagic[4] = {'A', '2', 'V', 'F'};
inline constexpr std::uint32_t kFeatureCacheVersion = 1;

std::string encode_feature_cache(const FeatureSequence& features);
FeatureSequence decode_feature_cache(std::string_view bytes);

void write_feature_cache(const std::filesystem::path& path,
                         const FeatureSequence& features);
FeatureSequence read_feature_cache(const std::filesystem::path& path);

}  // namespace dsp
}  // namespace spokenvec

#endif  // SPOKENVEC_FEATURES_HPP_
