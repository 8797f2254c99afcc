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

#ifndef SPOKENVEC_EMBEDDINGS_HPP_
#define SPOKENVEC_EMBEDDINGS_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "spokenvec/corpus.hpp"
#include "spokenvec/model.hpp"

namespace spokenvec::embed {

struct WordEmbedding {
  std::string word;
  Eigen::VectorXd vector;
};

// Normalizes each segment with `normalization` and encodes it; output is in
// segment order, one entry per segment. Segments are grouped by length into
// batches of up to `batch_size` so batches carry no padding.
template <typename Scalar>
std::vector<WordEmbedding> encode_corpus(
    const nn::ModelParams<Scalar>& params,
    const corpus::NormalizationStats& normalization,
    std::span<const corpus::WordSegment> segments, int threads = 1,
    int batch_size = 64);

// word -> vector, iterated in byte order of the words.
class WordVectorTable {
 public:
  WordVectorTable() = default;
  explicit WordVectorTable(int dimension) : dimension_(dimension) {}

  int dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  bool empty() const noexcept { return vectors_.empty(); }

  // Throws ContractViolation on a dimension mismatch or duplicate word.
  void insert(std::string word, Eigen::VectorXd vector, std::size_t count = 1);

  const Eigen::VectorXd* find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word) != nullptr; }

  // Number of segments averaged into each word (1 for imported tables).
  std::size_t count(std::string_view word) const;

  const std::map<std::string, Eigen::VectorXd, std::less<>>& vectors() const {
    return vectors_;
  }

 private:
  int dimension_ = 0;
  std::map<std::string, Eigen::VectorXd, std::less<>> vectors_;
  std::map<std::string, std::size_t, std::less<>> counts_;
};

// Arithmetic mean per word. Empty input gives an empty table.
WordVectorTable average_by_word(std::span<const WordEmbedding> pairs);

// One line per word: `word v1 ... vd`, values printed with 9 significant
// digits. Words containing whitespace are rejected with FormatError.
void export_table(const WordVectorTable& table, std::ostream& out);
void export_table(const WordVectorTable& table,
                  const std::filesystem::path& path);

struct ImportStats {
  bool had_header = false;
  // Distinct raw words that became equal after lowercasing; the first one
  // in file order is kept.
  std::size_t case_collisions = 0;
};

// Reads the export format, with or without a leading `count dim` line.
// Words are lowercased. Inconsistent dimensions, unparsable values, exact
// duplicate words, or a header count that disagrees with the body throw
// FormatError naming the line.
WordVectorTable import_table(std::istream& in, ImportStats* stats = nullptr);
WordVectorTable import_table(const std::filesystem::path& path,
                             ImportStats* stats = nullptr);

}  // namespace spokenvec::embed

#endif  // SPOKENVEC_EMBEDDINGS_HPP_
