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

#include <gtest/gtest.h>

#include <cmath>

#include "birdcolor/error.hpp"
#include "birdcolor/rng.hpp"
#include "birdcolor/spectrogram.hpp"
#include "oracles.hpp"

using namespace birdcolor;

namespace {

MelSpectrogram FromValues(std::size_t rows, std::size_t cols, std::vector<double> v) {
  MelSpectrogram s;
  s.values = Matrix(rows, cols);
  std::copy(v.begin(), v.end(), s.values.values().begin());
  return s;
}

TEST(MelScale, HtkFormulaAndInverse) {
  EXPECT_NEAR(HzToMel(1000.0), 2595.0 * std::log10(1.0 + 1000.0 / 700.0), 1e-12);
  for (double hz : {0.0, 300.0, 1234.5, 16000.0}) EXPECT_NEAR(MelToHz(HzToMel(hz)), hz, 1e-9);
}

TEST(MelScale, EdgesAndFilterbank) {
  MelConfig cfg;
  const auto edges = MelEdgeFrequencies(cfg);
  ASSERT_EQ(edges.size(), cfg.total_bins + 2);
  EXPECT_NEAR(edges.front(), cfg.f_min, 1e-9);
  EXPECT_NEAR(edges.back(), cfg.f_max, 1e-9);
  const double step = HzToMel(edges[1]) - HzToMel(edges[0]);
  for (std::size_t i = 1; i < edges.size(); ++i) {
    EXPECT_NEAR(HzToMel(edges[i]) - HzToMel(edges[i - 1]), step, 1e-9);
  }
  const Matrix fb = MelFilterbank(cfg);
  ASSERT_EQ(fb.rows(), cfg.total_bins);
  ASSERT_EQ(fb.cols(), cfg.fft_size / 2 + 1);
  for (std::size_t b = 0; b < fb.rows(); ++b) {
    double peak = 0.0;
    for (double w : fb.row(b)) {
      EXPECT_GE(w, 0.0);
      EXPECT_LE(w, 1.0);
      peak = std::max(peak, w);
    }
    EXPECT_GT(peak, 0.0) << "empty filter " << b;
  }
}

TEST(MelConfig, Validation) {
  MelConfig cfg;
  cfg.total_bins = 128;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = MelConfig{};
  cfg.f_max = 20000.0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = MelConfig{};
  cfg.f_min = cfg.f_max;
  EXPECT_THROW(cfg.Validate(), Error);
}

TEST(MelSpectrogram, SilenceIsZero) {
  const std::vector<double> x(32000, 0.0);
  const MelSpectrogram s = mel_spectrogram(x, MelConfig{});
  EXPECT_EQ(s.bins(), 126u);
  EXPECT_EQ(s.frames(), 1 + 32000 / 512u);
  for (double v : s.values.values()) EXPECT_EQ(v, 0.0);
}

TEST(MelSpectrogram, SineLandsInItsBin) {
  const MelConfig cfg;
  for (double f : {500.0, 1000.0, 2000.0, 4500.0, 9000.0, 14000.0}) {
    const auto x = oracle::Sine(f, 32000, 32000);
    const MelSpectrogram s = mel_spectrogram(x, cfg);
    ASSERT_EQ(s.bin_center_freqs.size(), cfg.total_bins);
    for (std::size_t t = 2; t + 2 < s.frames(); ++t) {
      std::size_t best = 0;
      for (std::size_t b = 1; b < s.bins(); ++b) {
        if (s.values(b, t) > s.values(best, t)) best = b;
      }
      const std::size_t nb = best + 1 < s.bins() ? best + 1 : best - 1;
      const double width = std::abs(s.bin_center_freqs[nb] - s.bin_center_freqs[best]);
      EXPECT_LE(std::abs(s.bin_center_freqs[best] - f), width) << f << " Hz frame " << t;
    }
  }
}

TEST(MelSpectrogram, WhiteNoiseFillsEveryBin) {
  Rng rng(8);
  std::vector<double> x(32000);
  for (double& v : x) v = rng.Normal();
  const MelSpectrogram s = mel_spectrogram(x, MelConfig{});
  for (std::size_t b = 0; b < s.bins(); ++b) {
    double total = 0.0;
    for (double v : s.values.row(b)) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_GT(total, 0.0) << b;
  }
}

TEST(MelSpectrogram, PowerScalesQuadratically) {
  Rng rng(3);
  std::vector<double> x(8000), y(8000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.Uniform(-0.5, 0.5);
    y[i] = 2.0 * x[i];
  }
  const auto a = mel_spectrogram(x, MelConfig{}).values;
  const auto b = mel_spectrogram(y, MelConfig{}).values;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(b.values()[i], 4.0 * a.values()[i], 1e-6 * std::max(1e-12, 4.0 * a.values()[i]));
  }
}

TEST(MelSpectrogram, TooShort) {
  const std::vector<double> x(2047, 0.1);
  try {
    mel_spectrogram(x, MelConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooShort);
  }
}

TEST(NormalizeLogNormalize, Examples) {
  const auto flat = normalize_log_normalize(FromValues(2, 3, {5, 5, 5, 5, 5, 5}));
  for (double v : flat.values.values()) EXPECT_EQ(v, 0.0);

  const auto ends = normalize_log_normalize(FromValues(2, 2, {0, 7, 7, 0}));
  EXPECT_EQ(ends.values(0, 0), 0.0);
  EXPECT_EQ(ends.values(0, 1), 1.0);
  EXPECT_EQ(ends.values(1, 0), 1.0);

  // Scripted evaluation of the three-step chain with beta = 1000.
  const auto s = normalize_log_normalize(FromValues(2, 2, {0, 1, 3, 4}), 1000.0);
  EXPECT_NEAR(s.values(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(s.values(0, 1), 0.7997755189799128, 1e-12);
  EXPECT_NEAR(s.values(1, 0), 0.9584079712292861, 1e-12);
  EXPECT_NEAR(s.values(1, 1), 1.0, 1e-12);
}

TEST(NormalizeLogNormalize, MonotoneWithUnitRange) {
  Rng rng(12);
  std::vector<double> v(200);
  for (double& x : v) x = std::exp(rng.Uniform(-20, 3));
  const auto in = FromValues(10, 20, v);
  const auto out = normalize_log_normalize(in);
  double lo = 1.0, hi = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    lo = std::min(lo, out.values.values()[i]);
    hi = std::max(hi, out.values.values()[i]);
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[i] < v[j]) EXPECT_LE(out.values.values()[i], out.values.values()[j]);
    }
  }
  EXPECT_EQ(lo, 0.0);
  EXPECT_EQ(hi, 1.0);
  EXPECT_THROW(normalize_log_normalize(FromValues(1, 2, {0, -1})), Error);
}

TEST(Frames, PoolAndFit) {
  Matrix m(1, 5);
  for (std::size_t i = 0; i < 5; ++i) m(0, i) = static_cast<double>(i + 1);
  const Matrix p = PoolFrames(m, 2);
  ASSERT_EQ(p.cols(), 3u);
  EXPECT_DOUBLE_EQ(p(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(p(0, 1), 3.5);
  EXPECT_DOUBLE_EQ(p(0, 2), 5.0);
  EXPECT_EQ(PoolFrames(m, 1), m);
  const Matrix wide = FitFrames(m, 7);
  ASSERT_EQ(wide.cols(), 7u);
  EXPECT_EQ(wide(0, 4), 5.0);
  EXPECT_EQ(wide(0, 6), 0.0);
  const Matrix narrow = FitFrames(m, 2);
  ASSERT_EQ(narrow.cols(), 2u);
  EXPECT_EQ(narrow(0, 1), 2.0);
}

}  // namespace
