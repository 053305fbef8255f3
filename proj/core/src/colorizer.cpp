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

#include "birdcolor/colorizer.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "birdcolor/error.hpp"

namespace birdcolor {

Rgb region_color(std::size_t bin_index, std::size_t total_bins) {
  Require(total_bins >= 3 && total_bins % 3 == 0, ErrorCode::kInvalidArgument,
          "total_bins must be a positive multiple of 3");
  Require(bin_index < total_bins, ErrorCode::kInvalidArgument, "bin_index out of range");
  const std::size_t per_region = total_bins / 3;
  const std::size_t region = bin_index / per_region;
  const double t = static_cast<double>(bin_index % per_region) / static_cast<double>(per_region);
  switch (region) {
    case 0: return {1.0 - t, t, 0.0};
    case 1: return {0.0, 1.0 - t, t};
    default: return {t, 0.0, 1.0 - t};
  }
}

ColorizedSpectrogram colorize(const MelSpectrogram& spec) {
  const std::size_t bins = spec.bins();
  const std::size_t frames = spec.frames();
  ColorizedSpectrogram out;
  out.config = spec.config;
  for (auto& ch : out.channels) ch = Matrix(bins, frames);
  for (std::size_t b = 0; b < bins; ++b) {
    const Rgb c = region_color(b, bins);
    for (std::size_t f = 0; f < frames; ++f) {
      const double v = spec.values(b, f);
      out.channels[0](b, f) = c.r * v;
      out.channels[1](b, f) = c.g * v;
      out.channels[2](b, f) = c.b * v;
    }
  }
  return out;
}

ColorizedSpectrogram replicate_gray(const MelSpectrogram& spec) {
  ColorizedSpectrogram out;
  out.config = spec.config;
  out.channels = {spec.values, spec.values, spec.values};
  return out;
}

void export_png(const ColorizedSpectrogram& img, const std::filesystem::path& path) {
  const std::size_t height = img.bins();
  const std::size_t width = img.frames();
  Require(height > 0 && width > 0, ErrorCode::kInvalidArgument, "empty image");
  std::vector<std::uint8_t> pixels(height * width * 3);
  for (std::size_t row = 0; row < height; ++row) {
    const std::size_t bin = height - 1 - row;
    for (std::size_t col = 0; col < width; ++col) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double v = std::clamp(img.channels[c](bin, col), 0.0, 1.0);
        pixels[(row * width + col) * 3 + c] = static_cast<std::uint8_t>(std::lround(255.0 * v));
      }
    }
  }

  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = PNG_FORMAT_RGB;
  const std::string file = path.string();
  if (png_image_write_to_file(&image, file.c_str(), 0, pixels.data(), 0, nullptr) == 0) {
    const std::string why = image.message;
    png_image_free(&image);
    Fail(ErrorCode::kIoError, "cannot write PNG " + file + ": " + why);
  }
}

ColorizedSpectrogram read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  const std::string file = path.string();
  if (png_image_begin_read_from_file(&image, file.c_str()) == 0) {
    Fail(ErrorCode::kIoError, "cannot read PNG " + file + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr) == 0) {
    const std::string why = image.message;
    png_image_free(&image);
    Fail(ErrorCode::kIoError, "cannot decode PNG " + file + ": " + why);
  }
  const std::size_t height = image.height;
  const std::size_t width = image.width;
  ColorizedSpectrogram out;
  for (auto& ch : out.channels) ch = Matrix(height, width);
  for (std::size_t row = 0; row < height; ++row) {
    const std::size_t bin = height - 1 - row;
    for (std::size_t col = 0; col < width; ++col) {
      for (std::size_t c = 0; c < 3; ++c) {
        out.channels[c](bin, col) = pixels[(row * width + col) * 3 + c] / 255.0;
      }
    }
  }
  return out;
}

}  // namespace birdcolor
