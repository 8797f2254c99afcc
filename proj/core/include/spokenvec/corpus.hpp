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

#ifndef SPOKENVEC_CORPUS_HPP_
#define SPOKENVEC_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "spokenvec/features.hpp"

namespace spokenvec::corpus {

struct AlignmentEntry {
  std::string utterance_id;
  std::string word;
  double start = 0;  // seconds
  double end = 0;    // seconds
};

struct UtteranceAlignment {
  std::string utterance_id;
  std::vector<AlignmentEntry> entries;  // sorted by start, non-overlapping
};

// Lowercases ASCII letters and removes punctuation. Apostrophes and hyphens
// between two alphanumeric characters are kept ("don't", "x-ray").
std::string normalize_word(std::string_view raw);

// Parses `utterance_id<TAB>word<TAB>start<TAB>end` lines; blank lines and
// lines starting with '#' are skipped. Utterances are returned in order of
// first appearance. Throws ParseError for malformed lines and
// ValidationError for end <= start, empty words, or overlapping words.
std::vector<UtteranceAlignment> load_alignments(std::istream& in);

struct WordSegment {
  std::string utterance_id;
  std::size_t index = 0;  // position within the utterance, from 0
  std::string word;
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;  // exclusive
  bool over_length_cap = false;
  FeatureSequence features;
};

struct ExcisionResult {
  std::vector<WordSegment> segments;
  std::size_t dropped_empty = 0;
  std::size_t over_length_cap = 0;
};

inline constexpr std::size_t kDefaultSegmentLengthCap = 100;

// Cuts frames [round(start / hop), round(end / hop)) clamped to [0, T) for
// each entry. Empty slices are dropped and counted. Throws InputError when
// every slice is empty.
ExcisionResult excise_segments(const FeatureSequence& utterance,
                               std::span<const AlignmentEntry> entries,
                               double hop,
                               std::size_t length_cap = kDefaultSegmentLengthCap);

struct NormalizationStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  static constexpr double kMinStddev = 1e-8;

  Eigen::Index dim() const noexcept { return mean.size(); }
  FeatureSequence apply(const FeatureSequence& x) const;
};

// Per-coefficient mean and population standard deviation over every frame
// of every segment, accumulated in two passes. Throws InputError if there
// are no frames.
NormalizationStats compute_normalization(
    std::span<const WordSegment> segments, int threads = 1);
NormalizationStats compute_normalization(
    std::span<const FeatureSequence> sequences, int threads = 1);

// Contiguous run of segments that belong to one utterance.
struct UtteranceSpan {
  std::size_t first = 0;
  std::size_t count = 0;
};

struct SkipGramTarget {
  int offset = 0;            // in [-k, -1] or [1, k]
  std::size_t segment = 0;   // global segment index
};

struct SkipGramExample {
  std::size_t center = 0;  // global segment index
  std::vector<SkipGramTarget> targets;
};

struct SkipGramBuild {
  std::vector<SkipGramExample> examples;
  std::size_t isolated_segments = 0;  // segments with no neighbour
};

// One example per segment that has at least one neighbour inside its own
// utterance; targets are ordered by offset -k..-1, 1..k.
SkipGramBuild build_skipgram_examples(std::span<const UtteranceSpan> utterances,
                                      int k);

// Segments stored utterance by utterance, with spans marking the groups.
struct Corpus {
  std::vector<WordSegment> segments;
  std::vector<UtteranceSpan> utterances;

  void append_utterance(std::vector<WordSegment> segs);
  Eigen::Index feature_dim() const;
};

// Segment manifest TSV:
// utterance_id<TAB>segment_index<TAB>word<TAB>start_frame<TAB>end_frame
struct ManifestRow {
  std::string utterance_id;
  std::size_t segment_index = 0;
  std::string word;
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;
};

void write_manifest(std::ostream& out, std::span<const ManifestRow> rows);
std::vector<ManifestRow> read_manifest(std::istream& in);
ManifestRow manifest_row(const WordSegment& segment);

// Rebuilds a corpus from per-utterance feature caches named
// `<utterance_id>.a2vf` under `features_dir` and the manifest rows.
Corpus load_corpus(const std::filesystem::path& features_dir,
                   std::span<const ManifestRow> rows);

}  // namespace spokenvec::corpus

#endif  // SPOKENVEC_CORPUS_HPP_
