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

#ifndef BIRDCOLOR_TRAIN_HPP_
#define BIRDCOLOR_TRAIN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "birdcolor/model.hpp"

namespace birdcolor {

struct TrainConfig {
  double lr_init = 3e-3;
  double lr_final = 1e-6;
  std::size_t batch_size = 16;
  std::size_t epochs = 20;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  // Decoupled decay; applied to conv and head weights only.
  double weight_decay = 1e-2;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Cosine annealing from lr_init at step 0 to lr_final at total_steps - 1.
double CosineLearningRate(const TrainConfig& config, std::size_t step,
                          std::size_t total_steps);

class AdamW {
 public:
  AdamW(const TrainConfig& config, const ModelParams& like);

  // One update with the given learning rate.
  void Step(ModelParams& params, const ModelParams& grad, double lr);

 private:
  TrainConfig config_;
  ModelParams m_;
  ModelParams v_;
  std::size_t t_ = 0;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_loss;     // mean bag loss per epoch
  std::vector<double> learning_rate;  // lr used at each step
};

// Mini-batch AdamW over shuffled bags. Batches are reduced sequentially in
// bag order, so a given seed always yields the same parameters.
TrainResult train(std::span<const RecordingBag> dataset, const ModelConfig& model_config,
                  const TrainConfig& config);

}  // namespace birdcolor

#endif  // BIRDCOLOR_TRAIN_HPP_
