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

#include "birdcolor/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

#include "birdcolor/error.hpp"
#include "birdcolor/rng.hpp"

namespace birdcolor {

void TrainConfig::Validate() const {
  Require(lr_init > 0.0 && lr_final > 0.0 && lr_final < lr_init, ErrorCode::kInvalidArgument,
          "require 0 < lr_final < lr_init");
  Require(epochs >= 1, ErrorCode::kInvalidArgument, "epochs must be at least 1");
  Require(batch_size >= 1, ErrorCode::kInvalidArgument, "batch_size must be at least 1");
  Require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
          ErrorCode::kInvalidArgument, "Adam moments must lie in [0, 1)");
  Require(weight_decay >= 0.0, ErrorCode::kInvalidArgument, "weight_decay must be >= 0");
}

double CosineLearningRate(const TrainConfig& config, std::size_t step,
                          std::size_t total_steps) {
  if (total_steps <= 1) return config.lr_init;
  const double progress =
      static_cast<double>(std::min(step, total_steps - 1)) / static_cast<double>(total_steps - 1);
  return config.lr_final +
         0.5 * (config.lr_init - config.lr_final) * (1.0 + std::cos(std::numbers::pi * progress));
}

AdamW::AdamW(const TrainConfig& config, const ModelParams& like)
    : config_(config), m_(ZeroLike(like)), v_(ZeroLike(like)) {}

void AdamW::Step(ModelParams& params, const ModelParams& grad, double lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  auto p = params.Tensors();
  const auto g = grad.Tensors();
  auto m = m_.Tensors();
  auto v = v_.Tensors();
  // Tensors() order: (conv weight, conv bias) x 3, head weight, head bias, alpha.
  for (std::size_t k = 0; k < p.size(); ++k) {
    const bool decays = k == 0 || k == 2 || k == 4 || k == 6;
    for (std::size_t i = 0; i < p[k].size(); ++i) {
      m[k][i] = config_.beta1 * m[k][i] + (1.0 - config_.beta1) * g[k][i];
      v[k][i] = config_.beta2 * v[k][i] + (1.0 - config_.beta2) * g[k][i] * g[k][i];
      const double update = (m[k][i] / bc1) / (std::sqrt(v[k][i] / bc2) + config_.adam_eps);
      if (decays) p[k][i] -= lr * config_.weight_decay * p[k][i];
      p[k][i] -= lr * update;
    }
  }
}

TrainResult train(std::span<const RecordingBag> dataset, const ModelConfig& model_config,
                  const TrainConfig& config) {
  config.Validate();
  model_config.Validate();
  Require(!dataset.empty(), ErrorCode::kEmptyDataset, "training set is empty");
  for (const auto& bag : dataset) {
    Require(bag.labels.size() == model_config.num_classes, ErrorCode::kShapeMismatch,
            "bag label length differs from class count");
  }

  Rng rng(config.seed);
  TrainResult result;
  result.params = InitParams(model_config, rng.NextU64());
  AdamW optimizer(config, result.params);

  const std::size_t n = dataset.size();
  const std::size_t batches_per_epoch = (n + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = batches_per_epoch * config.epochs;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      const std::size_t lo = b * config.batch_size;
      const std::size_t hi = std::min(n, lo + config.batch_size);
      ModelParams grad = ZeroLike(result.params);
      double batch_loss = 0.0;
      for (std::size_t k = lo; k < hi; ++k) {
        GradientResult g;
        try {
          g = compute_gradients(dataset[order[k]], result.params);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNonFinite) throw;
          Fail(ErrorCode::kNonFinite,
               "training diverged at step " + std::to_string(step) + ": " + e.what());
        }
        batch_loss += g.loss;
        auto dst = grad.Tensors();
        const auto src = std::as_const(g.grad).Tensors();
        for (std::size_t t = 0; t < dst.size(); ++t) {
          for (std::size_t i = 0; i < dst[t].size(); ++i) dst[t][i] += src[t][i];
        }
      }
      const double scale = 1.0 / static_cast<double>(hi - lo);
      for (auto t : grad.Tensors()) {
        for (double& x : t) x *= scale;
      }
      const double lr = CosineLearningRate(config, step, total_steps);
      result.learning_rate.push_back(lr);
      optimizer.Step(result.params, grad, lr);
      epoch_loss += batch_loss;
      ++step;
    }
    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss)) {
      Fail(ErrorCode::kNonFinite, "training diverged in epoch " + std::to_string(epoch));
    }
    result.epoch_loss.push_back(epoch_loss);
  }
  return result;
}

}  // namespace birdcolor
