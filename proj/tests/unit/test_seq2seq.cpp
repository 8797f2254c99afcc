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

#include "doctest.h"
#include "oracles/lstm_oracle.hpp"
#include "spokenvec/error.hpp"
#include "spokenvec/seq2seq.hpp"
#include "support/synthetic.hpp"

using namespace spokenvec;
using spokenvec::testing::random_sequence;

namespace {

nn::ModelConfig tiny(bool teacher_forcing = true,
                     nn::LossNormalization loss = nn::LossNormalization::kPerFrame) {
  nn::ModelConfig c;
  c.input_dim = 3;
  c.hidden_size = 6;
  c.encoder_layers = 2;
  c.loss = loss;
  c.teacher_forcing = teacher_forcing;
  return c;
}

struct Instance {
  FeatureSequence center;
  std::vector<FeatureSequence> targets;

  nn::ExampleView view() const {
    nn::ExampleView v{&center, {}};
    for (const auto& t : targets) v.targets.push_back(&t);
    return v;
  }
};

Instance random_instance(std::uint64_t seed, int num_targets = 4, int max_len = 4,
                         Eigen::Index dim = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(1, max_len);
  Instance in;
  in.center = random_sequence(rng, len(rng), dim);
  for (int i = 0; i < num_targets; ++i) {
    in.targets.push_back(random_sequence(rng, len(rng), dim));
  }
  return in;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

TEST_CASE("init_params follows the initialization contract") {
  const auto config = tiny();
  const auto a = nn::init_params<double>(config, 7);
  const auto b = nn::init_params<double>(config, 7);
  const auto c = nn::init_params<double>(config, 8);
  CHECK(a.flat() == b.flat());
  CHECK(a.flat() != c.flat());
  for (const auto& block : a.blocks()) {
    const auto values = a.flat().segment(block.offset, block.size());
    if (block.cols == 1) {
      // bias: zero except the forget-gate slice [h, 2h)
      const auto h = config.hidden_size;
      for (Eigen::Index r = 0; r < block.rows; ++r) {
        const bool forget = block.name != "projection.bias" && r >= h && r < 2 * h;
        CHECK(values(r) == (forget ? 1.0 : 0.0));
      }
    } else {
      const double bound = 1.0 / std::sqrt(static_cast<double>(block.cols));
      CHECK(values.cwiseAbs().maxCoeff() <= bound);
      CHECK(values.cwiseAbs().maxCoeff() > 0.5 * bound);
    }
  }
  // Same seed gives the same model in either precision.
  const auto f = nn::init_params<float>(config, 7);
  CHECK((f.flat().cast<double>() - a.flat()).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("parameter layout") {
  const auto config = tiny();
  nn::ModelParams<double> p(config);
  const Eigen::Index h = 6, d = 3;
  const Eigen::Index expected = (4 * h * d + 4 * h * h + 4 * h) +
                                (4 * h * h + 4 * h * h + 4 * h) +
                                (4 * h * d + 4 * h * h + 4 * h) + d * h + d;
  CHECK(p.size() == expected);
  CHECK(p.describe(0) == "encoder[0].w_input(0,0)");
  CHECK(p.describe(p.size() - 1) == "projection.bias(2,0)");
  CHECK(p.blocks().back().offset + p.blocks().back().size() == p.size());
  CHECK_THROWS_AS(nn::ModelParams<double>(nn::ModelConfig{0, 6, 2}), ConfigError);
}

TEST_CASE("lstm_cell_step matches the scalar oracle") {
  const auto config = tiny();
  const auto params = nn::init_params<double>(config, 3);
  const auto net = oracle::unpack<double>(config, params.blocks(), to_std(params.flat()));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(3), h(6), c(6);
  for (auto* v : {&x, &h, &c}) {
    for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) = normal(rng);
  }
  const auto next = nn::lstm_cell_step(params.encoder_layer(0), x, {h, c});
  std::vector<double> oh = to_std(h), oc = to_std(c);
  oracle::step(net.encoder[0], to_std(x), oh, oc);
  for (int i = 0; i < 6; ++i) {
    CHECK(next.h(i) == doctest::Approx(oh[static_cast<std::size_t>(i)]).epsilon(1e-13));
    CHECK(next.c(i) == doctest::Approx(oc[static_cast<std::size_t>(i)]).epsilon(1e-13));
  }
}

TEST_CASE("encode and skipgram_loss match the scalar oracle") {
  for (bool tf : {true, false}) {
    for (auto loss : {nn::LossNormalization::kPerFrame, nn::LossNormalization::kRawSum}) {
      const auto config = tiny(tf, loss);
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto params = nn::init_params<double>(config, seed);
        const auto net =
            oracle::unpack<double>(config, params.blocks(), to_std(params.flat()));
        const auto in = random_instance(100 + seed, 3, 6);
        const auto z = nn::encode(params, in.center);
        const auto oz = oracle::encode(net, in.center);
        for (int i = 0; i < 6; ++i) {
          CHECK(std::abs(z(i) - oz[static_cast<std::size_t>(i)]) < 1e-13);
        }
        const auto got = nn::skipgram_loss(params, in.view());
        CHECK(std::abs(got.total - oracle::skipgram_loss(net, in.view())) < 1e-12);
        REQUIRE(got.per_target.size() == 3);
        for (std::size_t t = 0; t < 3; ++t) {
          CHECK(std::abs(got.per_target[t] -
                         oracle::target_loss(net, oz, in.targets[t])) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("encode is length-covariant: one more frame is one more cell step") {
  const auto config = tiny();
  const auto params = nn::init_params<double>(config, 11);
  const auto net = oracle::unpack<double>(config, params.blocks(), to_std(params.flat()));
  std::mt19937_64 rng(2);
  auto x = random_sequence(rng, 5, 3);
  FeatureSequence longer;
  longer.frames.resize(6, 3);
  longer.frames.topRows(5) = x.frames;
  longer.frames.row(5) = random_sequence(rng, 1, 3).frames.row(0);

  // Oracle states after x, then inject one extra step.
  std::vector<std::vector<double>> h(2, std::vector<double>(6, 0.0)), c = h;
  for (Eigen::Index t = 0; t < 6; ++t) {
    auto in = oracle::row<double>(longer, t);
    for (std::size_t l = 0; l < 2; ++l) {
      oracle::step(net.encoder[l], in, h[l], c[l]);
      in = h[l];
    }
  }
  const auto z = nn::encode(params, longer);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(z(i) - h[1][static_cast<std::size_t>(i)]) < 1e-13);
  CHECK((nn::encode(params, x) - z).norm() > 1e-6);
}

TEST_CASE("decode_target teacher forcing and free running") {
  for (bool tf : {true, false}) {
    const auto config = tiny(tf);
    const auto params = nn::init_params<double>(config, 4);
    const auto net = oracle::unpack<double>(config, params.blocks(), to_std(params.flat()));
    const auto in = random_instance(9, 1, 4);
    std::mt19937_64 rng(1);
    const auto target = random_sequence(rng, 5, 3);
    const auto z = nn::encode(params, in.center);
    const auto y = nn::decode_target(params, z, target, tf);
    REQUIRE(y.rows() == 5);
    // replay with the oracle
    std::vector<double> h = oracle::encode(net, in.center), c(6, 0.0), input(3, 0.0);
    for (Eigen::Index t = 0; t < 5; ++t) {
      oracle::step(net.decoder, input, h, c);
      const auto out = oracle::project(net, h);
      for (int j = 0; j < 3; ++j) CHECK(std::abs(y(t, j) - out[static_cast<std::size_t>(j)]) < 1e-13);
      input = tf ? oracle::row<double>(target, t) : out;
    }
  }
}

TEST_CASE("loss is non-negative and exactly zero at a perfect fit") {
  const auto config = tiny();
  nn::ModelParams<double> zero(config);  // all-zero weights predict 0
  Instance in;
  in.center = random_instance(1).center;
  FeatureSequence silent;
  silent.frames = FeatureMatrix::Zero(3, 3);
  in.targets = {silent, silent};
  const auto g = nn::skipgram_gradient(zero, in.view());
  CHECK(g.loss == 0.0);
  CHECK(g.gradient.cwiseAbs().maxCoeff() == 0.0);

  const auto params = nn::init_params<double>(config, 1);
  for (std::uint64_t s = 0; s < 20; ++s) {
    CHECK(nn::skipgram_loss(params, random_instance(s).view()).total > 0.0);
  }
}

TEST_CASE("target order does not matter; duplicated targets double") {
  const auto config = tiny();
  const auto params = nn::init_params<double>(config, 5);
  auto in = random_instance(21, 4);
  const auto base = nn::skipgram_gradient(params, in.view());

  auto shuffled = in;
  std::reverse(shuffled.targets.begin(), shuffled.targets.end());
  const auto perm = nn::skipgram_gradient(params, shuffled.view());
  CHECK(std::abs(perm.loss - base.loss) < 1e-12);
  CHECK((perm.gradient - base.gradient).cwiseAbs().maxCoeff() < 1e-12);

  Instance one, twice;
  one.center = twice.center = in.center;
  one.targets = {in.targets[0]};
  twice.targets = {in.targets[0], in.targets[0]};
  const auto g1 = nn::skipgram_gradient(params, one.view());
  const auto g2 = nn::skipgram_gradient(params, twice.view());
  CHECK(std::abs(g2.loss - 2 * g1.loss) < 1e-12);
  CHECK((g2.gradient - 2 * g1.gradient).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("padded batches equal the sum of single examples") {
  for (bool tf : {true, false}) {
    const auto config = tiny(tf);
    const auto params = nn::init_params<double>(config, 13);
    std::vector<Instance> instances;
    for (std::uint64_t s = 0; s < 6; ++s) {
      instances.push_back(random_instance(300 + s, 1 + static_cast<int>(s % 4), 7));
    }
    std::vector<nn::ExampleView> views;
    for (const auto& in : instances) views.push_back(in.view());
    const auto batch = nn::make_padded_batch<double>(views);
    CHECK(batch.num_examples() == 6);
    CHECK(batch.centers.padding_frames() > 0);

    double loss_sum = 0;
    Eigen::VectorXd grad_sum = Eigen::VectorXd::Zero(params.size());
    std::vector<double> per_target;
    for (const auto& v : views) {
      const auto g = nn::skipgram_gradient(params, v);
      loss_sum += g.loss;
      grad_sum += g.gradient;
      const auto l = nn::skipgram_loss(params, v);
      per_target.insert(per_target.end(), l.per_target.begin(), l.per_target.end());
    }
    std::vector<double> batch_targets;
    CHECK(std::abs(nn::batch_loss(params, batch, &batch_targets) - loss_sum) < 1e-12);
    REQUIRE(batch_targets.size() == per_target.size());
    for (std::size_t i = 0; i < per_target.size(); ++i) {
      CHECK(std::abs(batch_targets[i] - per_target[i]) < 1e-13);
    }
    nn::ModelParams<double> grad(config);
    const double loss = nn::accumulate_gradient(params, batch, grad);
    CHECK(std::abs(loss - loss_sum) < 1e-12);
    CHECK((grad.flat() - grad_sum).cwiseAbs().maxCoeff() < 1e-12);

    // Batched encodings equal one-at-a-time encodings.
    const auto z = nn::encode_batch(params, batch.centers);
    for (std::size_t b = 0; b < instances.size(); ++b) {
      CHECK((z.col(static_cast<Eigen::Index>(b)) - nn::encode(params, instances[b].center))
                .cwiseAbs()
                .maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("analytic gradient matches an extended-precision difference oracle") {
  // Richardson-extrapolated central differences in long double resolve
  // gradient entries far below what plain 64-bit differences can, so the
  // relative-error metric can be applied to every parameter.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto config = tiny(seed % 2 == 0, seed % 4 < 2 ? nn::LossNormalization::kPerFrame
                                                         : nn::LossNormalization::kRawSum);
    const auto params = nn::init_params<double>(config, seed);
    const auto in = random_instance(seed + 1000);
    const auto g = nn::skipgram_gradient(params, in.view());
    std::vector<long double> flat(params.flat().data(),
                                  params.flat().data() + params.size());
    double worst = 0;
    for (std::size_t i = 0; i < flat.size(); ++i) {
      const auto n = static_cast<double>(oracle::richardson_derivative<long double>(
          config, params.blocks(), flat, i, in.view(), 1e-2L));
      const double a = g.gradient(static_cast<Eigen::Index>(i));
      worst = std::max(worst, std::abs(a - n) / std::max(1e-8, std::abs(a) + std::abs(n)));
    }
    INFO("seed " << seed);
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("finite_difference_check in 64-bit") {
  const auto config = tiny();
  const auto params = nn::init_params<double>(config, 2);
  const auto in = random_instance(77);
  const auto g = nn::skipgram_gradient(params, in.view());

  const auto report = nn::finite_difference_check(params, in.view(), 1e-5, g.gradient);
  CHECK(report.checked == static_cast<std::size_t>(params.size()));
  CHECK(report.worst_index >= 0);
  CHECK(report.worst_parameter == params.describe(report.worst_index));
  // The absolute disagreement stays at the level of the difference
  // quotient's own error, ~ulp(L)/eps.
  CHECK(std::abs(report.analytic_at_worst - report.numeric_at_worst) < 1e-9);

  // Detector sanity: a zero gradient away from a minimum fails loudly.
  const auto zero = nn::finite_difference_check(params, in.view(), 1e-5,
                                                Eigen::VectorXd::Zero(params.size()));
  CHECK(zero.max_relative_error > 0.99);

  const auto sampled = nn::finite_difference_check(params, in.view(), 1e-5, g.gradient, 50, 3);
  CHECK(sampled.checked == 50);
  CHECK(sampled.max_relative_error <= report.max_relative_error);
}

TEST_CASE("check_finite_gradient names the offending parameter") {
  const auto params = nn::init_params<double>(tiny(), 0);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(params.size());
  CHECK_NOTHROW(nn::check_finite_gradient(params, g));
  g(params.size() - 2) = std::nan("");
  try {
    nn::check_finite_gradient(params, g);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("projection.bias(1,0)") != std::string::npos);
  }
}

TEST_CASE("float and double paths agree") {
  const auto config = tiny();
  const auto pd = nn::init_params<double>(config, 6);
  const auto pf = nn::init_params<float>(config, 6);
  const auto in = random_instance(8);
  const auto ld = nn::skipgram_loss(pd, in.view()).total;
  const auto lf = nn::skipgram_loss(pf, in.view()).total;
  CHECK(std::abs(ld - static_cast<double>(lf)) < 1e-5 * std::max(1.0, ld));
  const auto gd = nn::skipgram_gradient(pd, in.view()).gradient;
  const auto gf = nn::skipgram_gradient(pf, in.view()).gradient;
  CHECK((gd - gf.cast<double>()).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("identical segments encode identically; shape errors are reported") {
  const auto params = nn::init_params<double>(tiny(), 1);
  const auto in = random_instance(4);
  CHECK(nn::encode(params, in.center) == nn::encode(params, in.center));
  std::mt19937_64 rng(0);
  const auto wrong = random_sequence(rng, 3, 5);
  CHECK_THROWS_AS(nn::encode(params, wrong), ContractViolation);
  FeatureSequence empty;
  empty.frames.resize(0, 3);
  CHECK_THROWS(nn::encode(params, empty));
}
