/*
 * Copyright 2026 The birdcolor Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "birdcolor/spectrogram.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "birdcolor/error.hpp"
#include "birdcolor/fft.hpp"

namespace birdcolor {
namespace {

void MinMaxInPlace(std::span<double> v) {
  if (v.empty()) return;
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  const double span = hi - lo;
  for (double& x : v) x = (x - lo) / span;
}

}  // namespace

void MelConfig::Validate() const {
  Require(sample_rate > 0, ErrorCode::kInvalidArgument, "sample_rate must be positive");
  Require(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0,
          ErrorCode::kInvalidArgument, "require 0 <= f_min < f_max <= sample_rate / 2");
  Require(total_bins >= 3 && total_bins % 3 == 0, ErrorCode::kInvalidArgument,
          "total_bins must be a positive multiple of 3");
  Require(fft_size >= 2 && hop >= 1, ErrorCode::kInvalidArgument, "invalid fft_size or hop");
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> MelEdgeFrequencies(const MelConfig& config) {
  const double lo = HzToMel(config.f_min);
  const double hi = HzToMel(config.f_max);
  const std::size_t n = config.total_bins + 2;
  std::vector<double> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    edges[i] = MelToHz(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  edges.front() = config.f_min;
  edges.back() = config.f_max;
  return edges;
}

Matrix MelFilterbank(const MelConfig& config) {
  config.Validate();
  const std::vector<double> edges = MelEdgeFrequencies(config);
  const std::size_t n_fft_bins = config.fft_size / 2 + 1;
  Matrix weights(config.total_bins, n_fft_bins);
  for (std::size_t b = 0; b < config.total_bins; ++b) {
    const double left = edges[b];
    const double center = edges[b + 1];
    const double right = edges[b + 2];
    for (std::size_t k = 0; k < n_fft_bins; ++k) {
      const double f = static_cast<double>(k) * config.sample_rate /
                       static_cast<double>(config.fft_size);
      const double rise = (f - left) / (center - left);
      const double fall = (right - f) / (right - center);
      weights(b, k) = std::max(0.0, std::min(rise, fall));
    }
  }
  return weights;
}

MelSpectrogram mel_spectrogram(std::span<const double> samples, const MelConfig& config) {
  config.Validate();
  const std::size_t n = samples.size();
  const std::size_t size = config.fft_size;
  Require(n >= size, ErrorCode::kTooShort,
          "event has " + std::to_string(n) + " samples, fewer than one FFT frame");

  const Matrix filterbank = MelFilterbank(config);
  const std::vector<double> window = HannWindow(size);
  const std::size_t pad = size / 2;
  const std::size_t n_frames = 1 + n / config.hop;
  RealFft fft(size);

  // Reflect padding (edge sample not repeated).
  auto sample_at = [&](std::ptrdiff_t idx) {
    const auto len = static_cast<std::ptrdiff_t>(n);
    if (idx < 0) idx = -idx;
    if (idx >= len) idx = 2 * (len - 1) - idx;
    return samples[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, len - 1))];
  };

  MelSpectrogram spec;
  spec.config = config;
  spec.values = Matrix(config.total_bins, n_frames);
  std::vector<double> frame(size);
  std::vector<std::complex<double>> bins(fft.bins());
  std::vector<double> power(fft.bins());
  for (std::size_t t = 0; t < n_frames; ++t) {
    const auto start = static_cast<std::ptrdiff_t>(t * config.hop) - static_cast<std::ptrdiff_t>(pad);
    for (std::size_t i = 0; i < size; ++i) {
      frame[i] = window[i] * sample_at(start + static_cast<std::ptrdiff_t>(i));
    }
    fft.Forward(frame, bins);
    for (std::size_t k = 0; k < bins.size(); ++k) power[k] = std::norm(bins[k]);
    for (std::size_t b = 0; b < config.total_bins; ++b) {
      const auto w = filterbank.row(b);
      double acc = 0.0;
      for (std::size_t k = 0; k < power.size(); ++k) acc += w[k] * power[k];
      spec.values(b, t) = acc;
    }
  }

  const std::vector<double> edges = MelEdgeFrequencies(config);
  spec.bin_center_freqs.assign(edges.begin() + 1, edges.end() - 1);
  return spec;
}

MelSpectrogram normalize_log_normalize(const MelSpectrogram& spec, double beta) {
  Require(beta > 0.0, ErrorCode::kInvalidArgument, "log compression beta must be positive");
  MelSpectrogram out = spec;
  auto v = out.values.values();
  for (double x : v) {
    Require(std::isfinite(x) && x >= 0.0, ErrorCode::kInvalidArgument,
            "spectrogram values must be finite and non-negative");
  }
  MinMaxInPlace(v);
  const double denom = std::log1p(beta);
  for (double& x : v) x = std::log1p(beta * x) / denom;
  MinMaxInPlace(v);
  return out;
}

Matrix PoolFrames(const Matrix& values, std::size_t factor) {
  Require(factor >= 1, ErrorCode::kInvalidArgument, "pool factor must be positive");
  if (factor == 1) return values;
  const std::size_t cols = (values.cols() + factor - 1) / factor;
  Matrix out(values.rows(), cols);
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t lo = c * factor;
      const std::size_t hi = std::min(values.cols(), lo + factor);
      double acc = 0.0;
      for (std::size_t k = lo; k < hi; ++k) acc += values(r, k);
      out(r, c) = acc / static_cast<double>(hi - lo);
    }
  }
  return out;
}

Matrix FitFrames(const Matrix& values, std::size_t frames) {
  Matrix out(values.rows(), frames);
  const std::size_t keep = std::min(frames, values.cols());
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < keep; ++c) out(r, c) = values(r, c);
  }
  return out;
}

}  // namespace birdcolor
