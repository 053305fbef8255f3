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

#ifndef BIRDCOLOR_MODEL_HPP_
#define BIRDCOLOR_MODEL_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "birdcolor/colorizer.hpp"
#include "birdcolor/matrix.hpp"

namespace birdcolor {

inline constexpr std::size_t kMaxInstances = 5;
inline constexpr double kProbabilityEpsilon = 1e-7;

// 3-channel image in CHW layout.
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;  // 3 * height * width

  Image() = default;
  Image(std::size_t h, std::size_t w) : height(h), width(w), data(3 * h * w, 0.0) {}

  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return data[(c * height + y) * width + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data[(c * height + y) * width + x];
  }
};

Image ToImage(const ColorizedSpectrogram& spec);

// One recording: up to kMaxInstances instance images plus a validity mask.
// Padded slots hold all-zero images and a mask flag of 0.
struct RecordingBag {
  std::vector<Image> instances;
  std::vector<std::uint8_t> mask;
  std::vector<double> labels;  // multi-hot, length C

  std::size_t active() const;
};

// Builds a bag from 1..kMaxInstances real instances, padding with zero
// images up to kMaxInstances.
RecordingBag MakeBag(std::vector<Image> real_instances, std::vector<double> labels);

struct ModelConfig {
  std::size_t num_classes = 1;
  std::size_t height = 0;
  std::size_t width = 0;
  // Output channels of the three conv blocks.
  std::array<std::size_t, 3> widths = {8, 16, 32};

  void Validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct ConvLayer {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::vector<double> weight;  // [out][in][3][3]
  std::vector<double> bias;    // [out]
};

// Instance encoder (three conv blocks: 3x3 same-padded conv, SiLU, 2x2
// average pool; then global average pooling and a linear head) plus the
// single AutoPool alpha shared by all classes. The same struct holds
// gradients.
struct ModelParams {
  ModelConfig config;
  std::array<ConvLayer, 3> conv;
  std::vector<double> head_weight;  // [C][widths[2]]
  std::vector<double> head_bias;    // [C]
  double alpha = 1.0;

  // Every trainable tensor, alpha last as a one-element span.
  std::vector<std::span<double>> Tensors();
  std::vector<std::span<const double>> Tensors() const;
  std::size_t ParameterCount() const;
  bool operator==(const ModelParams&) const;
};

// Zeroed parameters with the right shapes (alpha = 0).
ModelParams ZeroLike(const ModelParams& params);

// He-uniform conv kernels, uniform(+-1/sqrt(fan_in)) head, zero biases,
// alpha = 1.
ModelParams InitParams(const ModelConfig& config, std::uint64_t seed);

// Per-class probabilities p(Y|x) in (0, 1) for one instance.
std::vector<double> backbone_forward(const Image& instance, const ModelParams& params);

// AutoPool over the masked-in rows of probs [n x C], independently per class:
//   P = sum_x p(x) * exp(alpha p(x)) / sum_z exp(alpha p(z))
// Masked-out rows do not enter the softmax normaliser. Throws
// kInvalidArgument if nothing is masked in.
std::vector<double> autopool(const Matrix& probs, std::span<const std::uint8_t> mask,
                             double alpha);

// Mean binary cross entropy over classes, predictions clamped to
// [eps, 1 - eps].
double bce_loss(std::span<const double> pred, std::span<const double> target);

struct GradientResult {
  double loss = 0.0;
  ModelParams grad;
  // d loss / d pixel for each instance slot; all zero for padded slots.
  std::vector<Image> input_grad;
};

// Loss of one bag and its exact reverse-mode gradient with respect to every
// parameter including alpha. Throws kNonFinite if any intermediate is not
// finite.
GradientResult compute_gradients(const RecordingBag& bag, const ModelParams& params,
                                 bool want_input_grad = false);

// Loss only (forward path of compute_gradients).
double bag_loss(const RecordingBag& bag, const ModelParams& params);

// Recording-level probabilities [n_bags x C].
Matrix predict(std::span<const RecordingBag> bags, const ModelParams& params);
std::vector<double> predict_bag(const RecordingBag& bag, const ModelParams& params);

nlohmann::json params_to_json(const ModelParams& params);
ModelParams params_from_json(const nlohmann::json& doc);

}  // namespace birdcolor

#endif  // BIRDCOLOR_MODEL_HPP_
