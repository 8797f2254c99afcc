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

#include "spokenvec/embeddings.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_set>

#include "spokenvec/error.hpp"
#include "spokenvec/parallel.hpp"
#include "spokenvec/seq2seq.hpp"
#include "spokenvec/text.hpp"

namespace spokenvec::embed {

template <typename S>
std::vector<WordEmbedding> encode_corpus(
    const nn::ModelParams<S>& params,
    const corpus::NormalizationStats& normalization,
    std::span<const corpus::WordSegment> segments, int threads,
    int batch_size) {
  std::vector<WordEmbedding> out(segments.size());
  if (segments.empty()) return out;
  const auto dim = params.config().input_dim;
  if (normalization.dim() != dim) {
    throw ContractViolation("normalization stats do not match the model");
  }

  // Equal-length runs in segment order, cut to batch_size.
  std::vector<std::size_t> order(segments.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return segments[a].features.length() < segments[b].features.length();
  });
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && j - i < static_cast<std::size_t>(batch_size) &&
           segments[order[j]].features.length() ==
               segments[order[i]].features.length()) {
      ++j;
    }
    runs.emplace_back(i, j);
    i = j;
  }

  parallel_for(runs.size(), threads, [&](std::size_t r) {
    const auto [lo, hi] = runs[r];
    std::vector<FeatureSequence> normalized;
    normalized.reserve(hi - lo);
    for (auto i = lo; i < hi; ++i) {
      const auto& seg = segments[order[i]];
      if (seg.features.dim() != dim) {
        throw ContractViolation("segment dimension " +
                                std::to_string(seg.features.dim()) +
                                " does not match model input " +
                                std::to_string(dim));
      }
      normalized.push_back(normalization.apply(seg.features));
    }
    std::vector<const FeatureSequence*> ptrs;
    for (const auto& n : normalized) ptrs.push_back(&n);
    const auto z =
        nn::encode_batch(params, nn::SequenceBatch<S>::pack(ptrs));
    for (auto i = lo; i < hi; ++i) {
      auto& slot = out[order[i]];
      slot.word = segments[order[i]].word;
      slot.vector = z.col(static_cast<Eigen::Index>(i - lo)).template cast<double>();
    }
  });
  return out;
}

void WordVectorTable::insert(std::string word, Eigen::VectorXd vector,
                             std::size_t count) {
  if (vector.size() != dimension_) {
    throw ContractViolation("vector for '" + word + "' has dimension " +
                            std::to_string(vector.size()) + ", table has " +
                            std::to_string(dimension_));
  }
  if (word.empty()) throw ContractViolation("empty word");
  counts_[word] = count;
  auto [it, inserted] = vectors_.emplace(std::move(word), std::move(vector));
  if (!inserted) throw ContractViolation("duplicate word '" + it->first + "'");
}

const Eigen::VectorXd* WordVectorTable::find(std::string_view word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? nullptr : &it->second;
}

std::size_t WordVectorTable::count(std::string_view word) const {
  auto it = counts_.find(word);
  return it == counts_.end() ? 0 : it->second;
}

WordVectorTable average_by_word(std::span<const WordEmbedding> pairs) {
  if (pairs.empty()) return WordVectorTable();
  const auto dim = pairs.front().vector.size();
  std::map<std::string_view, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].vector.size() != dim) {
      throw ContractViolation("embeddings have different dimensions");
    }
    groups[pairs[i].word].push_back(i);
  }
  WordVectorTable table(static_cast<int>(dim));
  for (const auto& [word, members] : groups) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    for (auto i : members) sum += pairs[i].vector;
    table.insert(std::string(word), sum / static_cast<double>(members.size()),
                 members.size());
  }
  return table;
}

void export_table(const WordVectorTable& table, std::ostream& out) {
  char buf[32];
  for (const auto& [word, vec] : table.vectors()) {
    if (std::any_of(word.begin(), word.end(), text::is_space)) {
      throw FormatError("word '" + word + "' contains whitespace");
    }
    out << word;
    for (Eigen::Index i = 0; i < vec.size(); ++i) {
      std::snprintf(buf, sizeof buf, " %.9g", vec(i));
      out << buf;
    }
    out << '\n';
  }
}

void export_table(const WordVectorTable& table,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  export_table(table, out);
  if (!out) throw InputError("write failed for " + path.string());
}

WordVectorTable import_table(std::istream& in, ImportStats* stats) {
  ImportStats local;
  std::optional<std::size_t> declared_count;
  int dim = -1;
  std::vector<std::pair<std::string, Eigen::VectorXd>> rows;
  std::unordered_set<std::string> raw_seen;
  std::unordered_set<std::string> folded_seen;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = text::split_whitespace(line);
    if (fields.empty()) continue;
    if (first) {
      first = false;
      if (fields.size() == 2) {
        auto n = text::parse_size(fields[0]);
        auto d = text::parse_size(fields[1]);
        if (n && d) {
          declared_count = *n;
          dim = static_cast<int>(*d);
          local.had_header = true;
          continue;
        }
      }
    }
    const auto width = static_cast<int>(fields.size()) - 1;
    if (width < 1) throw FormatError("line " + std::to_string(line_no) + ": no vector values");
    if (dim < 0) dim = width;
    if (width != dim) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(dim) + " values, got " +
                        std::to_string(width));
    }
    std::string raw(fields[0]);
    if (!raw_seen.insert(raw).second) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": duplicate word '" + raw + "'");
    }
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) {
      auto value = text::parse_double(fields[static_cast<std::size_t>(i) + 1]);
      if (!value) {
        throw FormatError("line " + std::to_string(line_no) +
                          ": bad number '" +
                          std::string(fields[static_cast<std::size_t>(i) + 1]) +
                          "'");
      }
      v(i) = *value;
    }
    auto folded = text::to_lower(raw);
    if (!folded_seen.insert(folded).second) {
      ++local.case_collisions;
      continue;
    }
    rows.emplace_back(std::move(folded), std::move(v));
  }
  if (declared_count && *declared_count != raw_seen.size()) {
    throw FormatError("header declares " + std::to_string(*declared_count) +
                      " words, file has " + std::to_string(raw_seen.size()));
  }
  WordVectorTable table(std::max(dim, 0));
  for (auto& [w, v] : rows) table.insert(std::move(w), std::move(v));
  if (stats != nullptr) *stats = local;
  return table;
}

WordVectorTable import_table(const std::filesystem::path& path,
                             ImportStats* stats) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return import_table(in, stats);
}

template std::vector<WordEmbedding> encode_corpus<float>(
    const nn::ModelParams<float>&, const corpus::NormalizationStats&,
    std::span<const corpus::WordSegment>, int, int);
template std::vector<WordEmbedding> encode_corpus<double>(
    const nn::ModelParams<double>&, const corpus::NormalizationStats&,
    std::span<const corpus::WordSegment>, int, int);

}  // namespace spokenvec::embed
