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
#include "oracles.hpp"

using namespace birdcolor;

namespace {

Matrix Column(std::vector<double> v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

const std::vector<std::uint8_t> kAll3 = {1, 1, 1};

ModelConfig SmallConfig(std::size_t classes = 3) {
  ModelConfig cfg;
  cfg.num_classes = classes;
  cfg.height = 12;
  cfg.width = 10;
  cfg.widths = {2, 3, 4};
  return cfg;
}

TEST(AutoPool, Examples) {
  EXPECT_NEAR(autopool(Column({0.2, 0.4, 0.6}), kAll3, 0.0)[0], 0.4, 1e-12);
  const std::vector<std::uint8_t> two = {1, 1};
  EXPECT_NEAR(autopool(Column({0.2, 0.9}), two, 1e6)[0], 0.9, 1e-6);
  EXPECT_NEAR(autopool(Column({0.0, 1.0}), two, 1.0)[0], std::exp(1.0) / (1.0 + std::exp(1.0)),
              1e-12);
  const std::vector<std::uint8_t> first = {1, 0};
  for (double alpha : {-3.0, 0.0, 1.0, 50.0, 1e6}) {
    EXPECT_EQ(autopool(Column({0.3, 0.99}), first, alpha)[0], 0.3);
  }
}

TEST(AutoPool, ConvexAndMonotoneInAlpha) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.Below(5), classes = 1 + rng.Below(3);
    Matrix probs(n, classes);
    for (double& v : probs.values()) v = rng.Uniform();
    std::vector<std::uint8_t> mask(n, 0);
    for (auto& m : mask) m = rng.Uniform() < 0.7;
    mask[rng.Below(n)] = 1;
    for (std::size_t c = 0; c < classes; ++c) {
      double lo = 1.0, hi = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask[i]) {
          lo = std::min(lo, probs(i, c));
          hi = std::max(hi, probs(i, c));
        }
      }
      double previous = -1.0;
      for (double alpha : {0.0, 0.5, 1.0, 2.0, 8.0, 40.0}) {
        const double v = autopool(probs, mask, alpha)[c];
        EXPECT_GE(v, lo - 1e-15);
        EXPECT_LE(v, hi + 1e-15);
        EXPECT_GE(v, previous - 1e-12);
        previous = v;
      }
    }
  }
}

TEST(AutoPool, Errors) {
  const std::vector<std::uint8_t> none = {0, 0};
  EXPECT_THROW(autopool(Column({0.1, 0.2}), none, 1.0), Error);
  EXPECT_THROW(autopool(Column({0.1, 0.2}), kAll3, 1.0), Error);
}

TEST(BceLoss, Examples) {
  const std::vector<double> target = {1, 0, 1};
  EXPECT_LE(bce_loss(target, target), 1.1e-7);
  EXPECT_GE(bce_loss(target, target), 0.0);
  const std::vector<double> half = {0.5, 0.5, 0.5};
  EXPECT_NEAR(bce_loss(half, target), std::log(2.0), 1e-12);
  const std::vector<double> pred = {0.9, 0.2}, y = {1, 0};
  EXPECT_NEAR(bce_loss(pred, y), -(std::log(0.9) + std::log(0.8)) / 2.0, 1e-12);
  EXPECT_NEAR(bce_loss(pred, y), 0.164252, 1e-6);
  EXPECT_THROW(bce_loss(pred, target), Error);
}

TEST(BceLoss, NonNegative) {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> p(3), y(3);
    for (int c = 0; c < 3; ++c) {
      p[c] = rng.Uniform();
      y[c] = rng.Below(2);
    }
    EXPECT_GE(bce_loss(p, y), 0.0);
  }
}

TEST(Backbone, ZeroHeadGivesHalf) {
  ModelParams params = InitParams(SmallConfig(), 3);
  std::fill(params.head_weight.begin(), params.head_weight.end(), 0.0);
  std::fill(params.head_bias.begin(), params.head_bias.end(), 0.0);
  Rng rng(2);
  for (double p : backbone_forward(oracle::RandomImage(rng, 12, 10), params)) EXPECT_EQ(p, 0.5);
}

TEST(Backbone, DeterministicInitAndForward) {
  EXPECT_EQ(InitParams(SmallConfig(), 5), InitParams(SmallConfig(), 5));
  EXPECT_FALSE(InitParams(SmallConfig(), 5) == InitParams(SmallConfig(), 6));
  Rng rng(2);
  const Image img = oracle::RandomImage(rng, 12, 10);
  const ModelParams params = InitParams(SmallConfig(), 5);
  EXPECT_EQ(backbone_forward(img, params), backbone_forward(img, params));
}

TEST(Backbone, HeadWeightMovesOnlyItsClass) {
  const ModelParams params = InitParams(SmallConfig(), 8);
  Rng rng(4);
  const Image img = oracle::RandomImage(rng, 12, 10);
  const auto base = backbone_forward(img, params);
  ModelParams bumped = params;
  const std::size_t feat = params.config.widths[2];
  bumped.head_weight[1 * feat + 2] += 1e-5;
  const auto moved = backbone_forward(img, bumped);
  EXPECT_EQ(moved[0], base[0]);
  EXPECT_EQ(moved[2], base[2]);
  EXPECT_NE(moved[1], base[1]);
  // Finite-difference logit slope equals the pooled feature, which is >= 0
  // after SiLU only on average; just require it to be finite and nonzero.
  const auto logit = [](double p) { return std::log(p / (1.0 - p)); };
  const double slope = (logit(moved[1]) - logit(base[1])) / 1e-5;
  EXPECT_TRUE(std::isfinite(slope));
  EXPECT_NE(slope, 0.0);
}

TEST(Backbone, ShapeMismatch) {
  const ModelParams params = InitParams(SmallConfig(), 1);
  try {
    backbone_forward(Image(11, 10), params);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  ModelConfig bad = SmallConfig();
  bad.height = 4;
  EXPECT_THROW(bad.Validate(), Error);
}

TEST(Gradients, MatchFiniteDifferences) {
  Rng rng(2024);
  for (int trial = 0; trial < 15; ++trial) {
    const oracle::TinyCase tc = oracle::RandomTinyCase(rng);
    EXPECT_LT(oracle::MaxGradientError(tc.bag, tc.params, 1e-4), 1e-3) << "trial " << trial;
  }
}

TEST(Gradients, InputGradientMatchesFiniteDifferences) {
  Rng rng(7);
  const oracle::TinyCase tc = oracle::RandomTinyCase(rng);
  const GradientResult g = compute_gradients(tc.bag, tc.params, true);
  ASSERT_EQ(g.input_grad.size(), tc.bag.instances.size());
  RecordingBag probe = tc.bag;
  for (std::size_t i = 0; i < tc.bag.instances.size(); ++i) {
    if (!tc.bag.mask[i]) continue;
    for (std::size_t k = 0; k < probe.instances[i].data.size(); k += 7) {
      double& x = probe.instances[i].data[k];
      const double saved = x;
      x = saved + 1e-4;
      const double up = bag_loss(probe, tc.params);
      x = saved - 1e-4;
      const double down = bag_loss(probe, tc.params);
      x = saved;
      EXPECT_LT(oracle::RelativeError(g.input_grad[i].data[k], (up - down) / 2e-4), 1e-3);
    }
  }
}

TEST(Gradients, ZeroHeadGivesZeroAlphaGradient) {
  Rng rng(3);
  oracle::TinyCase tc = oracle::RandomTinyCase(rng);
  std::fill(tc.params.head_weight.begin(), tc.params.head_weight.end(), 0.0);
  EXPECT_EQ(compute_gradients(tc.bag, tc.params).grad.alpha, 0.0);
}

TEST(Gradients, MaskedInstancesGetExactZero) {
  Rng rng(5);
  std::vector<Image> real = {oracle::RandomImage(rng, 12, 10), oracle::RandomImage(rng, 12, 10)};
  const RecordingBag bag = MakeBag(real, {1.0, 0.0, 1.0});
  ASSERT_EQ(bag.instances.size(), kMaxInstances);
  EXPECT_EQ(bag.active(), 2u);
  const GradientResult g = compute_gradients(bag, InitParams(SmallConfig(), 4), true);
  for (std::size_t i = 2; i < kMaxInstances; ++i) {
    for (double v : g.input_grad[i].data) EXPECT_EQ(v, 0.0);
  }
  double any = 0.0;
  for (double v : g.input_grad[0].data) any += std::abs(v);
  EXPECT_GT(any, 0.0);
}

TEST(Predict, IdenticalInstancesPoolToSingle) {
  const ModelParams params = InitParams(SmallConfig(), 9);
  Rng rng(10);
  const Image img = oracle::RandomImage(rng, 12, 10);
  const auto single = backbone_forward(img, params);
  const auto pooled = predict_bag(MakeBag(std::vector<Image>(5, img), {0, 1, 0}), params);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(pooled[c], single[c], 1e-15);
}

TEST(Predict, PermutationInvariant) {
  const ModelParams params = InitParams(SmallConfig(), 11);
  Rng rng(12);
  std::vector<Image> imgs;
  for (int i = 0; i < 3; ++i) imgs.push_back(oracle::RandomImage(rng, 12, 10));
  const RecordingBag a = MakeBag(imgs, {1, 0, 0});
  std::vector<Image> swapped = {imgs[2], imgs[0], imgs[1]};
  RecordingBag b = MakeBag(swapped, {1, 0, 0});
  // Move the padding slot between real instances as well.
  std::swap(b.instances[1], b.instances[4]);
  std::swap(b.mask[1], b.mask[4]);
  const auto pa = predict_bag(a, params), pb = predict_bag(b, params);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(pa[c], pb[c], 1e-14);
  EXPECT_NEAR(bag_loss(a, params), bag_loss(b, params), 1e-14);
  const std::vector<RecordingBag> bags = {a, b};
  const Matrix m = predict(bags, params);
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m(0, 1), pa[1]);
}

TEST(Params, JsonRoundTripIsExact) {
  ModelParams params = InitParams(SmallConfig(4), 13);
  params.alpha = 0.123456789012345;
  const ModelParams back = params_from_json(nlohmann::json::parse(params_to_json(params).dump()));
  EXPECT_EQ(back, params);
  EXPECT_EQ(params.ParameterCount(),
            (3 * 2 * 9 + 2) + (2 * 3 * 9 + 3) + (3 * 4 * 9 + 4) + (4 * 4 + 4) + 1u);
  EXPECT_THROW(params_from_json(nlohmann::json{{"alpha", 1}}), Error);
}

}  // namespace
