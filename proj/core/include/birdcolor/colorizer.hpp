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

#ifndef BIRDCOLOR_COLORIZER_HPP_
#define BIRDCOLOR_COLORIZER_HPP_

#include <array>
#include <cstddef>
#include <filesystem>

#include "birdcolor/matrix.hpp"
#include "birdcolor/spectrogram.hpp"

namespace birdcolor {

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  bool operator==(const Rgb&) const = default;
};

// Three [bins x frames] planes in R, G, B order; row 0 is the lowest band.
struct ColorizedSpectrogram {
  std::array<Matrix, 3> channels;
  MelConfig config;

  std::size_t bins() const { return channels[0].rows(); }
  std::size_t frames() const { return channels[0].cols(); }
};

// Hue for a mel bin. The bins split into three equal regions of
// n = total_bins / 3 rows; with t = (bin_index mod n) / n the regions fade
// red->green, green->blue and blue->red:
//   region 0: (1 - t, t, 0)   region 1: (0, 1 - t, t)   region 2: (t, 0, 1 - t)
// Throws kInvalidArgument if bin_index >= total_bins or total_bins is not a
// positive multiple of 3.
Rgb region_color(std::size_t bin_index, std::size_t total_bins);

// Multiplies every pixel of row b by region_color(b). Each output pixel's
// channel sum equals the grayscale input.
ColorizedSpectrogram colorize(const MelSpectrogram& spec);

// Same value in all three planes; the no-colour control for ablations.
ColorizedSpectrogram replicate_gray(const MelSpectrogram& spec);

// 8-bit RGB PNG, v -> round(255 v) after clamping to [0, 1]. Image row 0 is
// the highest mel bin, so f_min ends up at the bottom.
void export_png(const ColorizedSpectrogram& img, const std::filesystem::path& path);

// Reads an 8-bit RGB PNG back into [0, 1] planes in the same orientation
// export_png uses (bottom image row -> bin 0).
ColorizedSpectrogram read_png(const std::filesystem::path& path);

}  // namespace birdcolor

#endif  // BIRDCOLOR_COLORIZER_HPP_
