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

#include "spokenvec/wordsim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>

#include "spokenvec/error.hpp"
#include "spokenvec/text.hpp"

namespace spokenvec::wordsim {

std::vector<BenchmarkPair> load_benchmark(std::istream& in) {
  std::vector<BenchmarkPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = text::split_whitespace(body);
    if (fields.size() != 3) {
      throw ParseError("expected 3 fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    const auto score = text::parse_double(fields[2]);
    if (!score || !std::isfinite(*score)) {
      throw ParseError("bad score '" + std::string(fields[2]) + "'", line_no);
    }
    pairs.push_back({text::to_lower(fields[0]), text::to_lower(fields[1]), *score});
  }
  return pairs;
}

std::vector<BenchmarkPair> load_benchmark(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open benchmark " + path.string());
  return load_benchmark(in);
}

double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != v.size()) {
    throw ContractViolation("cosine of vectors with different dimensions");
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0 || nv == 0) throw UndefinedError("cosine of a zero vector");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank mean(i+1..j).
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (auto p = i; p < j; ++p) ranks[order[p]] = r;
    i = j;
  }
  return ranks;
}

double spearman_rho(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ContractViolation("spearman_rho on lists of different lengths");
  }
  if (a.size() < 2) throw ContractViolation("spearman_rho needs >= 2 values");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  // Both rank lists have mean (n+1)/2.
  const double mean = 0.5 * static_cast<double>(a.size() + 1);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double da = ra[i] - mean;
    const double db = rb[i] - mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0 || sbb == 0) {
    throw UndefinedError("spearman_rho of a constant list");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

EvalResult evaluate(const embed::WordVectorTable& table,
                    std::span<const BenchmarkPair> benchmark,
                    std::string dataset) {
  if (benchmark.empty()) throw InputError("empty benchmark");
  EvalResult result;
  result.dataset = std::move(dataset);
  result.num_pairs = benchmark.size();
  std::vector<double> model, human;
  for (const auto& p : benchmark) {
    const auto* u = table.find(text::to_lower(p.word_a));
    const auto* v = table.find(text::to_lower(p.word_b));
    if (u == nullptr || v == nullptr) {
      ++result.num_not_found;
      continue;
    }
    try {
      model.push_back(cosine_similarity(*u, *v));
    } catch (const UndefinedError&) {
      ++result.num_not_found;
      continue;
    }
    human.push_back(p.human_score);
  }
  if (model.size() < 2) {
    throw InsufficientDataError(
        (result.dataset.empty() ? std::string("benchmark") : result.dataset) +
        ": only " + std::to_string(model.size()) + " evaluable pairs");
  }
  result.rho = spearman_rho(model, human);
  return result;
}

std::span<const CanonicalBenchmark> canonical_benchmarks() {
  static constexpr std::array<CanonicalBenchmark, 13> kList{{
      {"WS-353", 353},
      {"WS-353-REL", 252},
      {"WS-353-SIM", 203},
      {"MC-30", 30},
      {"RG-65", 65},
      {"Rare-Word", 2034},
      {"MEN", 3000},
      {"MTurk-287", 287},
      {"MTurk-771", 771},
      {"YP-130", 130},
      {"SimLex-999", 999},
      {"Verb-143", 144},
      {"SimVerb-3500", 3500},
  }};
  return kList;
}

std::vector<ManifestEntry> load_manifest(std::istream& in,
                                         const std::filesystem::path& base_dir) {
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || text::trim(line).front() == '#') continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2 && fields.size() != 3) {
      throw ParseError("expected name<TAB>path<TAB>expected_pairs", line_no);
    }
    ManifestEntry e;
    e.name = std::string(text::trim(fields[0]));
    e.path = std::filesystem::path(std::string(text::trim(fields[1])));
    if (e.name.empty() || e.path.empty()) {
      throw ParseError("empty name or path", line_no);
    }
    if (e.path.is_relative()) e.path = base_dir / e.path;
    if (fields.size() == 3 && !text::trim(fields[2]).empty()) {
      e.expected_pairs = text::parse_size(text::trim(fields[2]));
      if (!e.expected_pairs) {
        throw ParseError("bad expected pair count '" + std::string(fields[2]) + "'",
                         line_no);
      }
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest " + path.string());
  return load_manifest(in, path.parent_path());
}

namespace {

std::string rho4(double rho) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", rho);
  return buf;
}

}  // namespace

std::string report_text(std::span<const EvalResult> results) {
  std::size_t name_width = 7;
  for (const auto& r : results) name_width = std::max(name_width, r.dataset.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-4s  %-*s  %14s  %13s  %8s\n", "No.",
                static_cast<int>(name_width), "Dataset", "#(word pairs)",
                "#(not found)", "rho");
  out += buf;
  std::size_t no = 1;
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%-4zu  %-*s  %14zu  %13zu  %8s\n", no++,
                  static_cast<int>(name_width), r.dataset.c_str(), r.num_pairs,
                  r.num_not_found, rho4(r.rho).c_str());
    out += buf;
  }
  return out;
}

std::string report_tsv(std::span<const EvalResult> results) {
  std::string out = "No.\tDataset\t#(word pairs)\t#(not found)\trho\n";
  std::size_t no = 1;
  for (const auto& r : results) {
    out += std::to_string(no++) + '\t' + r.dataset + '\t' +
           std::to_string(r.num_pairs) + '\t' + std::to_string(r.num_not_found) +
           '\t' + rho4(r.rho) + '\n';
  }
  return out;
}

}  // namespace spokenvec::wordsim
