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

#include "spokenvec/mfcc.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "spokenvec/error.hpp"

namespace spokenvec::dsp {
namespace {

// FFTW planning is not thread-safe but executing a finished plan on fresh
// aligned buffers is, so plans are created once per size under a lock.
class RealFftPlans {
 public:
  static RealFftPlans& instance() {
    static RealFftPlans plans;
    return plans;
  }

  fftw_plan plan_for(int n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    auto* in = fftw_alloc_real(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    auto plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(n, plan);
    return plan;
  }

  ~RealFftPlans() {
    for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mu_;
  std::map<int, fftw_plan> plans_;
};

struct FftwRealDeleter {
  void operator()(double* p) const { fftw_free(p); }
};
struct FftwComplexDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

Eigen::MatrixXd orthonormal_dct(int num_out, int num_in) {
  Eigen::MatrixXd dct(num_out, num_in);
  for (int k = 0; k < num_out; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / num_in);
    for (int n = 0; n < num_in; ++n) {
      dct(k, n) =
          scale * std::cos(std::numbers::pi * k * (2.0 * n + 1.0) /
                           (2.0 * num_in));
    }
  }
  return dct;
}

Eigen::VectorXd hamming(int n) {
  Eigen::VectorXd w(n);
  if (n == 1) {
    w(0) = 1.0;
    return w;
  }
  for (int i = 0; i < n; ++i) {
    w(i) = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  }
  return w;
}

}  // namespace

int MfccConfig::frame_samples(int sample_rate) const {
  return static_cast<int>(std::lround(frame_length * sample_rate));
}

int MfccConfig::hop_samples(int sample_rate) const {
  return static_cast<int>(std::lround(frame_hop * sample_rate));
}

int MfccConfig::resolved_fft_size(int sample_rate) const {
  if (fft_size > 0) return fft_size;
  return static_cast<int>(
      std::bit_ceil(static_cast<unsigned>(frame_samples(sample_rate))));
}

void MfccConfig::validate(int sample_rate) const {
  if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
  if (!(frame_length > 0) || !(frame_hop > 0)) {
    throw ConfigError("frame length and hop must be positive");
  }
  if (frame_hop > frame_length) {
    throw ConfigError("frame hop must not exceed frame length");
  }
  if (frame_samples(sample_rate) < 1 || hop_samples(sample_rate) < 1) {
    throw ConfigError("frame or hop shorter than one sample");
  }
  if (num_coefficients <= 0 || num_coefficients > num_mel_filters) {
    throw ConfigError(
        "need 0 < num_coefficients <= num_mel_filters, got " +
        std::to_string(num_coefficients) + " and " +
        std::to_string(num_mel_filters));
  }
  if (pre_emphasis < 0 || pre_emphasis >= 1) {
    throw ConfigError("pre-emphasis must lie in [0, 1)");
  }
  if (!(log_floor > 0)) throw ConfigError("log floor must be positive");
  const int n = resolved_fft_size(sample_rate);
  if (!std::has_single_bit(static_cast<unsigned>(n))) {
    throw ConfigError("fft size must be a power of two");
  }
  if (n < frame_samples(sample_rate)) {
    throw ConfigError("fft size " + std::to_string(n) +
                      " is smaller than the frame (" +
                      std::to_string(frame_samples(sample_rate)) +
                      " samples)");
  }
}

double mel_from_hz(double hz) {
  if (!(hz >= 0)) throw DomainError("mel_from_hz: negative frequency");
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double hz_from_mel(double mel) {
  if (!(mel >= 0)) throw DomainError("hz_from_mel: negative mel value");
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Eigen::VectorXd mel_filter_centers(const MfccConfig& config,
                                   int sample_rate) {
  config.validate(sample_rate);
  const int m = config.num_mel_filters;
  const double top = mel_from_hz(sample_rate / 2.0);
  Eigen::VectorXd centers(m);
  for (int i = 0; i < m; ++i) {
    centers(i) = hz_from_mel(top * (i + 1) / (m + 1));
  }
  return centers;
}

Eigen::MatrixXd mel_filterbank(const MfccConfig& config, int sample_rate) {
  config.validate(sample_rate);
  const int m = config.num_mel_filters;
  const int n_fft = config.resolved_fft_size(sample_rate);
  const int bins = n_fft / 2 + 1;
  const double top = mel_from_hz(sample_rate / 2.0);

  std::vector<double> edges(static_cast<std::size_t>(m + 2));
  for (int j = 0; j < m + 2; ++j) {
    edges[static_cast<std::size_t>(j)] = hz_from_mel(top * j / (m + 1));
  }

  Eigen::MatrixXd bank = Eigen::MatrixXd::Zero(m, bins);
  for (int row = 0; row < m; ++row) {
    const double lo = edges[static_cast<std::size_t>(row)];
    const double mid = edges[static_cast<std::size_t>(row + 1)];
    const double hi = edges[static_cast<std::size_t>(row + 2)];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / n_fft;
      double w = 0.0;
      if (f > lo && f < mid) {
        w = (f - lo) / (mid - lo);
      } else if (f == mid) {
        w = 1.0;
      } else if (f > mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      bank(row, k) = w;
    }
    if (!(bank.row(row).maxCoeff() > 0)) {
      throw ConfigError("mel filter " + std::to_string(row) +
                        " covers no FFT bin; reduce num_mel_filters or "
                        "increase fft_size");
    }
  }
  return bank;
}

std::size_t frame_count(std::size_t num_samples, std::size_t frame,
                        std::size_t hop) {
  if (num_samples < frame || hop == 0) return 0;
  return 1 + (num_samples - frame) / hop;
}

FeatureSequence extract_mfcc(const Waveform& wave, const MfccConfig& config) {
  const int sr = wave.sample_rate;
  config.validate(sr);
  const auto frame = static_cast<std::size_t>(config.frame_samples(sr));
  const auto hop = static_cast<std::size_t>(config.hop_samples(sr));
  const int n_fft = config.resolved_fft_size(sr);
  const int bins = n_fft / 2 + 1;

  if (wave.samples.size() < frame) {
    throw InputError("signal of " + std::to_string(wave.samples.size()) +
                     " samples is shorter than one frame (" +
                     std::to_string(frame) + ")");
  }
  for (double s : wave.samples) {
    if (!std::isfinite(s)) throw InputError("signal has non-finite samples");
  }

  const auto bank = mel_filterbank(config, sr);
  const auto dct = orthonormal_dct(config.num_coefficients,
                                   config.num_mel_filters);
  const auto window = hamming(static_cast<int>(frame));

  std::vector<double> emphasized(wave.samples.size());
  emphasized[0] = wave.samples[0];
  for (std::size_t i = 1; i < wave.samples.size(); ++i) {
    emphasized[i] = wave.samples[i] - config.pre_emphasis * wave.samples[i - 1];
  }

  const auto num_frames = frame_count(wave.samples.size(), frame, hop);
  FeatureSequence out;
  out.frames.resize(static_cast<Eigen::Index>(num_frames),
                    config.num_coefficients);

  auto plan = RealFftPlans::instance().plan_for(n_fft);
  std::unique_ptr<double, FftwRealDeleter> in(
      fftw_alloc_real(static_cast<std::size_t>(n_fft)));
  std::unique_ptr<fftw_complex, FftwComplexDeleter> spec(
      fftw_alloc_complex(static_cast<std::size_t>(bins)));
  Eigen::VectorXd power(bins);

  for (std::size_t t = 0; t < num_frames; ++t) {
    const double* src = emphasized.data() + t * hop;
    for (std::size_t i = 0; i < frame; ++i) {
      in.get()[i] = src[i] * window(static_cast<Eigen::Index>(i));
    }
    for (auto i = static_cast<int>(frame); i < n_fft; ++i) in.get()[i] = 0.0;
    fftw_execute_dft_r2c(plan, in.get(), spec.get());
    for (int k = 0; k < bins; ++k) {
      const double re = spec.get()[k][0];
      const double im = spec.get()[k][1];
      power(k) = (re * re + im * im) / n_fft;
    }
    Eigen::VectorXd log_energy =
        (bank * power).cwiseMax(config.log_floor).array().log().matrix();
    out.frames.row(static_cast<Eigen::Index>(t)) =
        (dct * log_energy).transpose();
  }
  return out;
}

}  // namespace spokenvec::dsp
