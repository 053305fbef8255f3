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

#ifndef BIRDCOLOR_SPECTROGRAM_HPP_
#define BIRDCOLOR_SPECTROGRAM_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "birdcolor/matrix.hpp"

namespace birdcolor {

// Mel analysis parameters. total_bins must be a multiple of 3 so the
// colorizer can split the bins into three equal regions.
struct MelConfig {
  double f_min = 300.0;
  double f_max = 16000.0;
  std::size_t total_bins = 126;
  std::size_t fft_size = 2048;
  std::size_t hop = 512;
  int sample_rate = 32000;

  // Throws kInvalidArgument on any violated constraint.
  void Validate() const;
};

// values is [total_bins x n_frames]; row 0 is the bin nearest f_min.
struct MelSpectrogram {
  Matrix values;
  MelConfig config;
  std::vector<double> bin_center_freqs;

  std::size_t bins() const { return values.rows(); }
  std::size_t frames() const { return values.cols(); }
};

// HTK mel scale.
double HzToMel(double hz);
double MelToHz(double mel);

// total_bins + 2 edge frequencies, equally spaced in mel from f_min to
// f_max. Filter b rises from edge b to edge b+1 and falls to edge b+2.
std::vector<double> MelEdgeFrequencies(const MelConfig& config);

// Triangular filterbank weights, [total_bins x (fft_size/2 + 1)].
Matrix MelFilterbank(const MelConfig& config);

// Power STFT (periodic Hann, centred frames with reflect padding,
// n_frames = 1 + n / hop) projected through the mel filterbank. Values are
// raw power. Throws kTooShort if samples.size() < fft_size.
MelSpectrogram mel_spectrogram(std::span<const double> samples, const MelConfig& config);

// Log compression used between the two normalisations.
inline constexpr double kLogCompressionBeta = 10000.0;

// Min-max to [0, 1], then log(1 + beta v) / log(1 + beta), then min-max
// again. A constant matrix maps to all zeros.
MelSpectrogram normalize_log_normalize(const MelSpectrogram& spec,
                                       double beta = kLogCompressionBeta);

// Averages groups of `factor` adjacent frames (trailing partial group
// averaged over its own length). Used to shrink model inputs.
Matrix PoolFrames(const Matrix& values, std::size_t factor);

// Pads with zero columns or truncates to exactly `frames` columns.
Matrix FitFrames(const Matrix& values, std::size_t frames);

}  // namespace birdcolor

#endif  // BIRDCOLOR_SPECTROGRAM_HPP_
