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


// Scalar reference for the skip-gram sequence-to-sequence loss: plain loops
// over std::vector, no Eigen, no batching. Parameters are read from a flat
// vector through the documented block layout only.

#ifndef SPOKENVEC_TESTS_LSTM_ORACLE_HPP_
#define SPOKENVEC_TESTS_LSTM_ORACLE_HPP_

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "spokenvec/features.hpp"
#include "spokenvec/model.hpp"
#include "spokenvec/seq2seq.hpp"

namespace spokenvec::oracle {

template <typename T>
using Vec = std::vector<T>;

template <typename T>
struct Block {
  std::size_t rows = 0, cols = 0;
  Vec<T> data;  // column-major
  T at(std::size_t r, std::size_t c) const { return data[c * rows + r]; }
};

template <typename T>
struct Layer {
  Block<T> wx, wh, b;
};

template <typename T>
struct Net {
  int hidden = 0, dim = 0;
  bool per_frame = true;
  bool teacher_forcing = true;
  std::vector<Layer<T>> encoder;
  Layer<T> decoder;
  Block<T> proj_w, proj_b;
};

template <typename T, typename Flat>
Net<T> unpack(const nn::ModelConfig& config,
              const std::vector<nn::ParamBlock>& blocks, const Flat& flat) {
  auto read = [&](const std::string& name) {
    for (const auto& b : blocks) {
      if (b.name != name) continue;
      Block<T> out;
      out.rows = static_cast<std::size_t>(b.rows);
      out.cols = static_cast<std::size_t>(b.cols);
      for (Eigen::Index i = 0; i < b.size(); ++i) {
        out.data.push_back(static_cast<T>(flat[static_cast<std::size_t>(b.offset + i)]));
      }
      return out;
    }
    throw std::runtime_error("no block " + name);
  };
  auto layer = [&](const std::string& p) {
    return Layer<T>{read(p + ".w_input"), read(p + ".w_recurrent"), read(p + ".bias")};
  };
  Net<T> net;
  net.hidden = config.hidden_size;
  net.dim = config.input_dim;
  net.per_frame = config.loss == nn::LossNormalization::kPerFrame;
  net.teacher_forcing = config.teacher_forcing;
  for (int l = 0; l < config.encoder_layers; ++l) {
    net.encoder.push_back(layer("encoder[" + std::to_string(l) + "]"));
  }
  net.decoder = layer("decoder");
  net.proj_w = read("projection.weight");
  net.proj_b = read("projection.bias");
  return net;
}

template <typename T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

// One LSTM step; h and c are updated in place.
template <typename T>
void step(const Layer<T>& L, const Vec<T>& x, Vec<T>& h, Vec<T>& c) {
  const std::size_t n = h.size();
  Vec<T> pre(4 * n);
  for (std::size_t r = 0; r < 4 * n; ++r) {
    T s = L.b.at(r, 0);
    for (std::size_t j = 0; j < x.size(); ++j) s += L.wx.at(r, j) * x[j];
    for (std::size_t j = 0; j < n; ++j) s += L.wh.at(r, j) * h[j];
    pre[r] = s;
  }
  for (std::size_t u = 0; u < n; ++u) {
    const T i = sigmoid(pre[u]);
    const T f = sigmoid(pre[n + u]);
    const T g = std::tanh(pre[2 * n + u]);
    const T o = sigmoid(pre[3 * n + u]);
    c[u] = f * c[u] + i * g;
    h[u] = o * std::tanh(c[u]);
  }
}

template <typename T>
Vec<T> row(const FeatureSequence& s, Eigen::Index t) {
  Vec<T> v(static_cast<std::size_t>(s.dim()));
  for (Eigen::Index j = 0; j < s.dim(); ++j) v[static_cast<std::size_t>(j)] = static_cast<T>(s.frames(t, j));
  return v;
}

template <typename T>
Vec<T> encode(const Net<T>& net, const FeatureSequence& x) {
  const auto n = static_cast<std::size_t>(net.hidden);
  std::vector<Vec<T>> h(net.encoder.size(), Vec<T>(n, T(0)));
  std::vector<Vec<T>> c = h;
  for (Eigen::Index t = 0; t < x.length(); ++t) {
    Vec<T> in = row<T>(x, t);
    for (std::size_t l = 0; l < net.encoder.size(); ++l) {
      step(net.encoder[l], in, h[l], c[l]);
      in = h[l];
    }
  }
  return h.back();
}

template <typename T>
Vec<T> project(const Net<T>& net, const Vec<T>& h) {
  Vec<T> y(static_cast<std::size_t>(net.dim));
  for (std::size_t r = 0; r < y.size(); ++r) {
    T s = net.proj_b.at(r, 0);
    for (std::size_t j = 0; j < h.size(); ++j) s += net.proj_w.at(r, j) * h[j];
    y[r] = s;
  }
  return y;
}

template <typename T>
T target_loss(const Net<T>& net, const Vec<T>& z, const FeatureSequence& target) {
  Vec<T> h = z;
  Vec<T> c(z.size(), T(0));
  Vec<T> input(static_cast<std::size_t>(net.dim), T(0));
  T sum = 0;
  for (Eigen::Index t = 0; t < target.length(); ++t) {
    step(net.decoder, input, h, c);
    const Vec<T> y = project(net, h);
    const Vec<T> x = row<T>(target, t);
    for (std::size_t j = 0; j < y.size(); ++j) sum += (y[j] - x[j]) * (y[j] - x[j]);
    input = net.teacher_forcing ? x : y;
  }
  if (net.per_frame) sum /= static_cast<T>(target.length() * target.dim());
  return sum;
}

template <typename T>
T skipgram_loss(const Net<T>& net, const nn::ExampleView& example) {
  const Vec<T> z = encode(net, *example.center);
  T total = 0;
  for (const auto* target : example.targets) total += target_loss(net, z, *target);
  return total;
}

template <typename T>
T skipgram_loss(const nn::ModelConfig& config,
                const std::vector<nn::ParamBlock>& blocks, const Vec<T>& flat,
                const nn::ExampleView& example) {
  return skipgram_loss(unpack<T>(config, blocks, flat), example);
}

// Central differences at steps e, e/2 and e/4 combined by two rounds of
// Richardson extrapolation, which cancel the e^2 and e^4 error terms.
template <typename T>
T richardson_derivative(const nn::ModelConfig& config,
                        const std::vector<nn::ParamBlock>& blocks, Vec<T> flat,
                        std::size_t index, const nn::ExampleView& example, T e) {
  const T base = flat[index];
  auto central = [&](T step) {
    flat[index] = base + step;
    const T up = skipgram_loss(config, blocks, flat, example);
    flat[index] = base - step;
    const T down = skipgram_loss(config, blocks, flat, example);
    return (up - down) / (2 * step);
  };
  const T d1 = central(e), d2 = central(e / 2), d4 = central(e / 4);
  const T r1 = (4 * d2 - d1) / 3;
  const T r2 = (4 * d4 - d2) / 3;
  return (16 * r2 - r1) / 15;
}

}  // namespace spokenvec::oracle

#endif  // SPOKENVEC_TESTS_LSTM_ORACLE_HPP_
