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

#include "spokenvec/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "spokenvec/error.hpp"
#include "spokenvec/parallel.hpp"
#include "spokenvec/text.hpp"

namespace spokenvec::corpus {
namespace {

bool is_alnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 ||
         static_cast<unsigned char>(c) >= 0x80;
}

double parse_seconds(std::string_view field, std::size_t line,
                     const char* what) {
  auto v = text::parse_double(field);
  if (!v || !std::isfinite(*v)) {
    throw ParseError(std::string("bad ") + what + " time '" +
                         std::string(field) + "'",
                     line);
  }
  return *v;
}

std::size_t parse_index(std::string_view field, std::size_t line,
                        const char* what) {
  auto v = text::parse_size(field);
  if (!v) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(field) +
                         "'",
                     line);
  }
  return *v;
}

// Fixed number of reduction chunks so the summation order does not depend
// on the thread count.
constexpr std::size_t kReduceChunks = 64;

NormalizationStats normalization_from(
    std::size_t n, const std::function<const FeatureMatrix&(std::size_t)>& at,
    int threads) {
  Eigen::Index dim = -1;
  std::size_t frames = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = at(i);
    if (m.rows() == 0) continue;
    if (dim < 0) dim = m.cols();
    if (m.cols() != dim) {
      throw ContractViolation("segments have different feature dimensions");
    }
    frames += static_cast<std::size_t>(m.rows());
  }
  if (frames == 0) throw InputError("normalization needs at least one frame");

  const std::size_t chunks = std::min(kReduceChunks, n);
  auto chunk_range = [&](std::size_t c) {
    return std::pair{c * n / chunks, (c + 1) * n / chunks};
  };

  std::vector<Eigen::VectorXd> partial(chunks, Eigen::VectorXd::Zero(dim));
  parallel_for(chunks, threads, [&](std::size_t c) {
    auto [lo, hi] = chunk_range(c);
    for (std::size_t i = lo; i < hi; ++i) {
      const auto& m = at(i);
      if (m.rows() > 0) partial[c] += m.colwise().sum().transpose();
    }
  });
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto& p : partial) mean += p;
  mean /= static_cast<double>(frames);

  parallel_for(chunks, threads, [&](std::size_t c) {
    partial[c].setZero();
    auto [lo, hi] = chunk_range(c);
    for (std::size_t i = lo; i < hi; ++i) {
      const auto& m = at(i);
      if (m.rows() == 0) continue;
      partial[c] += (m.rowwise() - mean.transpose())
                        .array()
                        .square()
                        .colwise()
                        .sum()
                        .matrix()
                        .transpose();
    }
  });
  Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
  for (const auto& p : partial) var += p;
  var /= static_cast<double>(frames);

  NormalizationStats stats;
  stats.mean = mean;
  stats.stddev =
      var.array().sqrt().max(NormalizationStats::kMinStddev).matrix();
  return stats;
}

}  // namespace

std::string normalize_word(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (is_alnum(c)) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if ((c == '\'' || c == '-') && !out.empty() && i + 1 < raw.size() &&
               is_alnum(out.back()) && is_alnum(raw[i + 1])) {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<UtteranceAlignment> load_alignments(std::istream& in) {
  std::vector<UtteranceAlignment> groups;
  std::unordered_map<std::string, std::size_t> slot;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = text::split(line, '\t');
    if (fields.size() != 4) {
      throw ParseError("expected 4 tab-separated fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    AlignmentEntry e;
    e.utterance_id = std::string(text::trim(fields[0]));
    if (e.utterance_id.empty()) throw ParseError("empty utterance id", line_no);
    e.word = normalize_word(text::trim(fields[1]));
    e.start = parse_seconds(text::trim(fields[2]), line_no, "start");
    e.end = parse_seconds(text::trim(fields[3]), line_no, "end");
    if (e.word.empty()) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": word is empty after normalization");
    }
    if (!(e.end > e.start)) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": end time must be greater than start time");
    }
    auto [it, inserted] = slot.try_emplace(e.utterance_id, groups.size());
    if (inserted) groups.push_back({e.utterance_id, {}});
    groups[it->second].entries.push_back(std::move(e));
  }
  for (auto& g : groups) {
    std::stable_sort(g.entries.begin(), g.entries.end(),
                     [](const auto& a, const auto& b) { return a.start < b.start; });
    for (std::size_t i = 1; i < g.entries.size(); ++i) {
      if (g.entries[i].start < g.entries[i - 1].end) {
        throw ValidationError("utterance " + g.utterance_id + ": word '" +
                              g.entries[i].word + "' overlaps '" +
                              g.entries[i - 1].word + "'");
      }
    }
  }
  return groups;
}

ExcisionResult excise_segments(const FeatureSequence& utterance,
                               std::span<const AlignmentEntry> entries,
                               double hop, std::size_t length_cap) {
  if (!(hop > 0)) throw ConfigError("hop must be positive");
  const auto total = static_cast<long long>(utterance.length());
  ExcisionResult result;
  for (const auto& e : entries) {
    auto to_frame = [&](double seconds) {
      auto f = std::llround(seconds / hop);
      return static_cast<std::size_t>(std::clamp(f, 0LL, total));
    };
    const auto begin = to_frame(e.start);
    const auto end = to_frame(e.end);
    if (end <= begin) {
      ++result.dropped_empty;
      continue;
    }
    WordSegment seg;
    seg.utterance_id = e.utterance_id;
    seg.index = result.segments.size();
    seg.word = normalize_word(e.word);
    seg.start_frame = begin;
    seg.end_frame = end;
    seg.features.frames = utterance.frames.middleRows(
        static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin));
    seg.over_length_cap = (end - begin) > length_cap;
    if (seg.over_length_cap) ++result.over_length_cap;
    result.segments.push_back(std::move(seg));
  }
  if (result.segments.empty()) {
    throw InputError("every word slice of the utterance is empty");
  }
  return result;
}

FeatureSequence NormalizationStats::apply(const FeatureSequence& x) const {
  if (x.dim() != dim()) {
    throw ContractViolation("normalization dimension " + std::to_string(dim()) +
                            " does not match features of dimension " +
                            std::to_string(x.dim()));
  }
  FeatureSequence out;
  out.frames = ((x.frames.rowwise() - mean.transpose()).array().rowwise() /
                stddev.transpose().array())
                   .matrix();
  return out;
}

NormalizationStats compute_normalization(std::span<const WordSegment> segments,
                                         int threads) {
  return normalization_from(
      segments.size(),
      [&](std::size_t i) -> const FeatureMatrix& {
        return segments[i].features.frames;
      },
      threads);
}

NormalizationStats compute_normalization(
    std::span<const FeatureSequence> sequences, int threads) {
  return normalization_from(
      sequences.size(),
      [&](std::size_t i) -> const FeatureMatrix& { return sequences[i].frames; },
      threads);
}

SkipGramBuild build_skipgram_examples(std::span<const UtteranceSpan> utterances,
                                      int k) {
  if (k < 1) throw ConfigError("skip-gram window k must be at least 1");
  SkipGramBuild build;
  for (const auto& utt : utterances) {
    const auto n = static_cast<long long>(utt.count);
    for (long long c = 0; c < n; ++c) {
      SkipGramExample ex;
      ex.center = utt.first + static_cast<std::size_t>(c);
      for (int off = -k; off <= k; ++off) {
        if (off == 0) continue;
        const long long j = c + off;
        if (j < 0 || j >= n) continue;
        ex.targets.push_back({off, utt.first + static_cast<std::size_t>(j)});
      }
      if (ex.targets.empty()) {
        ++build.isolated_segments;
      } else {
        build.examples.push_back(std::move(ex));
      }
    }
  }
  return build;
}

void Corpus::append_utterance(std::vector<WordSegment> segs) {
  UtteranceSpan span{segments.size(), segs.size()};
  for (auto& s : segs) segments.push_back(std::move(s));
  utterances.push_back(span);
}

Eigen::Index Corpus::feature_dim() const {
  return segments.empty() ? 0 : segments.front().features.dim();
}

ManifestRow manifest_row(const WordSegment& segment) {
  return {segment.utterance_id, segment.index, segment.word,
          segment.start_frame, segment.end_frame};
}

void write_manifest(std::ostream& out, std::span<const ManifestRow> rows) {
  out << "# utterance_id\tsegment_index\tword\tstart_frame\tend_frame\n";
  for (const auto& r : rows) {
    out << r.utterance_id << '\t' << r.segment_index << '\t' << r.word << '\t'
        << r.start_frame << '\t' << r.end_frame << '\n';
  }
}

std::vector<ManifestRow> read_manifest(std::istream& in) {
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = text::split(line, '\t');
    if (fields.size() != 5) {
      throw ParseError("expected 5 tab-separated manifest fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    ManifestRow r;
    r.utterance_id = std::string(fields[0]);
    r.segment_index = parse_index(fields[1], line_no, "segment index");
    r.word = std::string(fields[2]);
    r.start_frame = parse_index(fields[3], line_no, "start frame");
    r.end_frame = parse_index(fields[4], line_no, "end frame");
    if (r.end_frame <= r.start_frame) {
      throw ValidationError("manifest line " + std::to_string(line_no) +
                            ": empty frame range");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

Corpus load_corpus(const std::filesystem::path& features_dir,
                   std::span<const ManifestRow> rows) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<const ManifestRow*>> by_utt;
  for (const auto& r : rows) {
    auto [it, inserted] = by_utt.try_emplace(r.utterance_id);
    if (inserted) order.push_back(r.utterance_id);
    it->second.push_back(&r);
  }
  Corpus corpus;
  for (const auto& utt : order) {
    auto& group = by_utt[utt];
    std::sort(group.begin(), group.end(), [](const auto* a, const auto* b) {
      return a->segment_index < b->segment_index;
    });
    const auto features =
        dsp::read_feature_cache(features_dir / (utt + ".a2vf"));
    std::vector<WordSegment> segs;
    for (std::size_t i = 0; i < group.size(); ++i) {
      const auto& r = *group[i];
      if (r.segment_index != i) {
        throw ValidationError("utterance " + utt +
                              ": segment indices are not consecutive from 0");
      }
      if (r.end_frame > static_cast<std::size_t>(features.length())) {
        throw ValidationError("utterance " + utt + ": segment " +
                              std::to_string(i) + " ends past frame " +
                              std::to_string(features.length()));
      }
      WordSegment s;
      s.utterance_id = utt;
      s.index = i;
      s.word = r.word;
      s.start_frame = r.start_frame;
      s.end_frame = r.end_frame;
      s.over_length_cap = (r.end_frame - r.start_frame) > kDefaultSegmentLengthCap;
      s.features.frames = features.frames.middleRows(
          static_cast<Eigen::Index>(r.start_frame),
          static_cast<Eigen::Index>(r.end_frame - r.start_frame));
      segs.push_back(std::move(s));
    }
    corpus.append_utterance(std::move(segs));
  }
  return corpus;
}

}  // namespace spokenvec::corpus
