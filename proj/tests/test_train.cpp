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
#include "birdcolor/model.hpp"
#include "birdcolor/rng.hpp"
#include "birdcolor/train.hpp"

using namespace birdcolor;

namespace {

ModelConfig Config() {
  ModelConfig cfg;
  cfg.num_classes = 3;
  cfg.height = 9;
  cfg.width = 9;
  cfg.widths = {3, 4, 6};
  return cfg;
}

// Class c lights up a horizontal band in channel c.
std::vector<RecordingBag> SeparableSet(std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<RecordingBag> bags;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t r = 0; r < per_class; ++r) {
      std::vector<Image> instances;
      const std::size_t n = 1 + rng.Below(3);
      for (std::size_t i = 0; i < n; ++i) {
        Image img(9, 9);
        for (double& v : img.data) v = 0.1 * rng.Uniform();
        for (std::size_t x = 0; x < 9; ++x) img.at(c, 3 + c, x) += 0.9;
        instances.push_back(std::move(img));
      }
      std::vector<double> labels(3, 0.0);
      labels[c] = 1.0;
      bags.push_back(MakeBag(std::move(instances), std::move(labels)));
    }
  }
  return bags;
}

TEST(Schedule, Endpoints) {
  const TrainConfig cfg;
  EXPECT_NEAR(CosineLearningRate(cfg, 0, 100), 3e-3, 1e-15);
  EXPECT_NEAR(CosineLearningRate(cfg, 99, 100), 1e-6, 1e-15);
  EXPECT_NEAR(CosineLearningRate(cfg, 0, 1), 3e-3, 1e-15);
  // Halfway through the cosine the rate is the midpoint.
  EXPECT_NEAR(CosineLearningRate(cfg, 50, 101), 0.5 * (3e-3 + 1e-6), 1e-15);
  double previous = 1.0;
  for (std::size_t s = 0; s < 100; ++s) {
    const double lr = CosineLearningRate(cfg, s, 100);
    EXPECT_LE(lr, previous);
    previous = lr;
  }
}

TEST(Config, Validation) {
  TrainConfig cfg;
  cfg.lr_final = cfg.lr_init;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = TrainConfig{};
  cfg.epochs = 0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.Validate(), Error);
}

TEST(AdamW, DecayAppliesToWeightsOnly) {
  ModelParams params = InitParams(Config(), 1);
  for (auto t : params.Tensors()) std::fill(t.begin(), t.end(), 1.0);
  TrainConfig cfg;
  AdamW opt(cfg, params);
  opt.Step(params, ZeroLike(params), 0.5);
  const auto tensors = std::as_const(params).Tensors();
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    const bool weight = k == 0 || k == 2 || k == 4 || k == 6;
    for (double v : tensors[k]) EXPECT_DOUBLE_EQ(v, weight ? 1.0 - 0.5 * 1e-2 : 1.0) << k;
  }
}

TEST(AdamW, FirstStepMovesByLearningRate) {
  ModelParams params = InitParams(Config(), 1);
  ModelParams grad = ZeroLike(params);
  grad.alpha = 3.7;
  grad.head_bias[0] = -0.2;
  TrainConfig cfg;
  cfg.weight_decay = 0.0;
  AdamW opt(cfg, params);
  const ModelParams before = params;
  opt.Step(params, grad, 0.01);
  EXPECT_NEAR(params.alpha, before.alpha - 0.01, 1e-9);
  EXPECT_NEAR(params.head_bias[0], before.head_bias[0] + 0.01, 1e-9);
  EXPECT_EQ(params.head_bias[1], before.head_bias[1]);
}

TEST(Train, LossDecreasesOnSeparableSet) {
  const auto bags = SeparableSet(8, 3);
  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.epochs = 40;
  const TrainResult r = train(bags, Config(), cfg);
  ASSERT_EQ(r.epoch_loss.size(), 40u);
  EXPECT_LT(r.epoch_loss.back(), r.epoch_loss.front());
  const std::size_t steps = 40 * ((bags.size() + 3) / 4);
  ASSERT_EQ(r.learning_rate.size(), steps);
  EXPECT_NEAR(r.learning_rate.front(), 3e-3, 1e-9);
  EXPECT_NEAR(r.learning_rate.back(), 1e-6, 1e-9);
  const Matrix p = predict(bags, r.params);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < bags.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < 3; ++c) {
      if (p(i, c) > p(i, best)) best = c;
    }
    correct += bags[i].labels[best] == 1.0;
  }
  EXPECT_GE(correct, bags.size() * 9 / 10);
}

TEST(Train, Deterministic) {
  const auto bags = SeparableSet(3, 4);
  TrainConfig cfg;
  cfg.batch_size = 2;
  cfg.epochs = 2;
  cfg.seed = 77;
  const TrainResult a = train(bags, Config(), cfg);
  const TrainResult b = train(bags, Config(), cfg);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  cfg.seed = 78;
  EXPECT_FALSE(train(bags, Config(), cfg).params == a.params);
}

TEST(Train, Errors) {
  std::vector<RecordingBag> none;
  try {
    train(none, Config(), TrainConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyDataset);
  }
  auto bags = SeparableSet(1, 1);
  bags[0].labels.push_back(0.0);
  EXPECT_THROW(train(bags, Config(), TrainConfig{}), Error);
}

}  // namespace
