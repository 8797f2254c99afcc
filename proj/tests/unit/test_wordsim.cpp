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


#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "spokenvec/error.hpp"
#include "spokenvec/wordsim.hpp"

using namespace spokenvec;
using namespace spokenvec::wordsim;

namespace {

// Rank of x = 1 + #(smaller) + (#(equal) - 1) / 2.
double brute_rho(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r;
    for (double x : v) {
      double less = 0, equal = 0;
      for (double y : v) {
        less += y < x;
        equal += y == x;
      }
      r.push_back(1 + less + (equal - 1) / 2);
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(ra.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i] / n;
    mb += rb[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::vector<BenchmarkPair> parse(const std::string& text) {
  std::istringstream in(text);
  return load_benchmark(in);
}

}  // namespace

TEST_CASE("load_benchmark") {
  const auto pairs = parse("# header\ntiger cat 7.35\n\nBook  Paper\t7.46\n");
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].word_a == "tiger");
  CHECK(pairs[0].word_b == "cat");
  CHECK(pairs[0].human_score == 7.35);
  CHECK(pairs[1].word_a == "book");
  CHECK(pairs[1].word_b == "paper");

  auto error_line = [](const std::string& text) {
    try {
      (void)parse(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(error_line("a b 1\na b x\n") == 2);
  CHECK(error_line("a b\n") == 1);
  CHECK(error_line("a b 1\n# c\na b 1 2\n") == 3);
  CHECK(error_line("a b nan\n") == 1);
}

TEST_CASE("cosine_similarity") {
  const auto u = vec({1, 2, 3});
  CHECK(cosine_similarity(u, u) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(vec({1, 0}), vec({0, 1})) == 0.0);
  CHECK(cosine_similarity(u, vec({4, 5, 6})) ==
        doctest::Approx(32 / (std::sqrt(14.0) * std::sqrt(77.0))).epsilon(1e-15));
  CHECK(cosine_similarity(u, vec({4, 5, 6})) == doctest::Approx(0.974632).epsilon(1e-6));
  CHECK(cosine_similarity(u, -u) == -1.0);
  CHECK_THROWS_AS(cosine_similarity(u, vec({0, 0, 0})), UndefinedError);
  CHECK_THROWS_AS(cosine_similarity(u, vec({1, 2})), ContractViolation);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd a(5), b(5);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    const double c = cosine_similarity(a, b);
    CHECK(std::abs(c) <= 1.0);
    CHECK(std::abs(cosine_similarity(scale(rng) * a, b) - c) < 1e-12);
  }
}

TEST_CASE("spearman_rho examples") {
  const std::vector<double> a{1, 2, 3};
  CHECK(spearman_rho(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<double> r{3, 2, 1};
  CHECK(spearman_rho(a, r) == doctest::Approx(-1.0).epsilon(1e-15));
  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 1, 4, 3, 5};
  CHECK(spearman_rho(x, y) == doctest::Approx(0.8).epsilon(1e-15));
  const std::vector<double> t1{1, 2, 2, 4}, t2{1, 3, 2, 4};
  CHECK(spearman_rho(t1, t2) == doctest::Approx(brute_rho(t1, t2)).epsilon(1e-15));
  CHECK(average_ranks(t1) == std::vector<double>{1, 2.5, 2.5, 4});

  const std::vector<double> flat{2, 2, 2};
  CHECK_THROWS_AS(spearman_rho(flat, a), UndefinedError);
  CHECK_THROWS_AS(spearman_rho(a, x), ContractViolation);
  const std::vector<double> one{1};
  CHECK_THROWS_AS(spearman_rho(one, one), ContractViolation);
}

TEST_CASE("spearman_rho matches brute force on small lists with ties") {
  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<int> len(2, 7);
  std::uniform_int_distribution<int> value(0, 4);
  int checked = 0;
  while (checked < 1000) {
    const int n = len(rng);
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = value(rng);
    for (auto& v : b) v = value(rng);
    const auto constant = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
    };
    if (constant(a) || constant(b)) {
      CHECK_THROWS_AS(spearman_rho(a, b), UndefinedError);
      continue;
    }
    const double rho = spearman_rho(a, b);
    CHECK(std::abs(rho - brute_rho(a, b)) < 1e-12);
    CHECK(std::abs(rho) <= 1.0);
    CHECK(spearman_rho(b, a) == rho);

    // Strictly increasing transforms keep ranks, so rho is unchanged exactly.
    std::vector<double> ta(n), tb(n);
    std::transform(a.begin(), a.end(), ta.begin(), [](double v) { return std::exp(v) + 3; });
    std::transform(b.begin(), b.end(), tb.begin(), [](double v) { return v * v * v - 10; });
    CHECK(spearman_rho(ta, tb) == rho);
    ++checked;
  }
}

TEST_CASE("evaluate counts missing pairs") {
  embed::WordVectorTable t(2);
  t.insert("a", vec({1, 0}));
  t.insert("b", vec({1, 1}));
  t.insert("c", vec({0, 1}));
  t.insert("z", vec({0, 0}));
  const auto bench = parse(
      "a b 9\n"
      "A c 1\n"
      "a q 5\n"
      "q r 5\n"
      "z a 5\n");
  const auto r = evaluate(t, bench, "toy");
  CHECK(r.dataset == "toy");
  CHECK(r.num_pairs == 5);
  CHECK(r.num_not_found == 3);
  CHECK(r.rho == doctest::Approx(1.0));

  CHECK_THROWS_AS(evaluate(t, parse("a b 1\nq r 2\n")), InsufficientDataError);
  CHECK_THROWS_AS(evaluate(t, {}), InputError);
}

TEST_CASE("evaluate is invariant to rescaling and line order") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  embed::WordVectorTable t(4), scaled(4);
  for (int w = 0; w < 30; ++w) {
    Eigen::VectorXd v(4);
    for (auto& x : v) x = g(rng);
    t.insert("w" + std::to_string(w), v);
    scaled.insert("w" + std::to_string(w), 7.5 * v);
  }
  std::uniform_int_distribution<int> pick(0, 34);
  std::vector<BenchmarkPair> bench;
  for (int i = 0; i < 80; ++i) {
    bench.push_back({"w" + std::to_string(pick(rng)), "w" + std::to_string(pick(rng)), g(rng)});
  }
  const auto base = evaluate(t, bench);
  CHECK(base.num_not_found > 0);
  CHECK(evaluate(scaled, bench).rho == doctest::Approx(base.rho).epsilon(1e-12));
  for (int i = 0; i < 10; ++i) {
    std::shuffle(bench.begin(), bench.end(), rng);
    const auto r = evaluate(t, bench);
    CHECK(r.rho == doctest::Approx(base.rho).epsilon(1e-12));
    CHECK(r.num_not_found == base.num_not_found);
  }
}

TEST_CASE("canonical benchmarks") {
  const auto c = canonical_benchmarks();
  REQUIRE(c.size() == 13);
  CHECK(std::string(c[0].name) == "WS-353");
  CHECK(c[0].table_pairs == 353);
  CHECK(std::string(c[5].name) == "Rare-Word");
  CHECK(c[5].table_pairs == 2034);
  CHECK(std::string(c[12].name) == "SimVerb-3500");
  CHECK(c[12].table_pairs == 3500);
}

TEST_CASE("manifest") {
  std::istringstream in("# name path count\nWS-353\tws/353.txt\t353\nMEN\t/abs/men.txt\n");
  const auto m = load_manifest(in, "/data");
  REQUIRE(m.size() == 2);
  CHECK(m[0].name == "WS-353");
  CHECK(m[0].path == std::filesystem::path("/data/ws/353.txt"));
  CHECK(m[0].expected_pairs == 353u);
  CHECK(m[1].path == std::filesystem::path("/abs/men.txt"));
  CHECK_FALSE(m[1].expected_pairs.has_value());

  std::istringstream bad("WS-353 ws.txt\n");
  CHECK_THROWS_AS(load_manifest(bad, "/"), ParseError);
  std::istringstream count("WS-353\tws.txt\tmany\n");
  CHECK_THROWS_AS(load_manifest(count, "/"), ParseError);
}

TEST_CASE("reports") {
  CHECK(report_tsv({}) == "No.\tDataset\t#(word pairs)\t#(not found)\trho\n");
  const auto header_only = report_text({});
  CHECK(std::count(header_only.begin(), header_only.end(), '\n') == 1);

  std::vector<EvalResult> rs{{"WS-353", 353, 0, 0.60544}, {"Rare-Word", 2034, 252, -0.41176}};
  const auto tsv = report_tsv(rs);
  CHECK(tsv ==
        "No.\tDataset\t#(word pairs)\t#(not found)\trho\n"
        "1\tWS-353\t353\t0\t0.6054\n"
        "2\tRare-Word\t2034\t252\t-0.4118\n");
  const auto text = report_text(rs);
  CHECK(text.find("0.6054") != std::string::npos);
  CHECK(text.find("-0.4118") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
