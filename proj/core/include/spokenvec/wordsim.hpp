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

#ifndef SPOKENVEC_WORDSIM_HPP_
#define SPOKENVEC_WORDSIM_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spokenvec/embeddings.hpp"

namespace spokenvec::wordsim {

struct BenchmarkPair {
  std::string word_a;
  std::string word_b;
  double human_score = 0;
};

// `word1 word2 score` per line; '#' starts a comment line. Words are
// lowercased. Throws ParseError naming the line on malformed input.
std::vector<BenchmarkPair> load_benchmark(std::istream& in);
std::vector<BenchmarkPair> load_benchmark(const std::filesystem::path& path);

// Throws UndefinedError if either vector is all zeros, ContractViolation on
// a size mismatch.
double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& v);

// 1-based fractional ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of average ranks. Throws ContractViolation when the
// sizes differ or are < 2, UndefinedError when either list is constant.
double spearman_rho(std::span<const double> a, std::span<const double> b);

struct EvalResult {
  std::string dataset;
  std::size_t num_pairs = 0;
  std::size_t num_not_found = 0;
  double rho = 0;
};

// Pairs with a missing word or a zero vector count as not found and are
// left out of rho. Throws InsufficientDataError with fewer than 2 usable
// pairs.
EvalResult evaluate(const embed::WordVectorTable& table,
                    std::span<const BenchmarkPair> benchmark,
                    std::string dataset = {});

struct CanonicalBenchmark {
  const char* name;
  std::size_t table_pairs;  // published pair count
};

// The 13 benchmarks in report order.
std::span<const CanonicalBenchmark> canonical_benchmarks();

struct ManifestEntry {
  std::string name;
  std::filesystem::path path;
  std::optional<std::size_t> expected_pairs;
};

// `name<TAB>path<TAB>expected_pairs` lines ('#' comments allowed; the count
// column may be omitted). Relative paths resolve against `base_dir`.
std::vector<ManifestEntry> load_manifest(std::istream& in,
                                         const std::filesystem::path& base_dir);
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

// Fixed-width table with columns No., Dataset, #(word pairs), #(not found),
// rho to four decimals.
std::string report_text(std::span<const EvalResult> results);
std::string report_tsv(std::span<const EvalResult> results);

}  // namespace spokenvec::wordsim

#endif  // SPOKENVEC_WORDSIM_HPP_
