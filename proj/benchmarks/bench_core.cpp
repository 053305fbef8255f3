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

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "birdcolor/colorizer.hpp"
#include "birdcolor/events.hpp"
#include "birdcolor/experiment.hpp"
#include "birdcolor/model.hpp"
#include "birdcolor/rng.hpp"
#include "birdcolor/spectrogram.hpp"

namespace {

using namespace birdcolor;

AudioClip NoisyClip(double seconds) {
  Rng rng(3);
  AudioClip clip;
  clip.sample_rate = kCanonicalSampleRate;
  clip.samples.resize(static_cast<std::size_t>(seconds * clip.sample_rate));
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    clip.samples[i] = 0.05 * rng.Normal() + 0.3 * std::sin(2.0 * M_PI * 2500.0 * i / clip.sample_rate);
  }
  return clip;
}

Image RandomImage(const ModelConfig& mc, Rng& rng) {
  Image img(mc.height, mc.width);
  for (double& v : img.data) v = rng.Uniform();
  return img;
}

void BM_MelSpectrogram(benchmark::State& state) {
  const AudioClip clip = NoisyClip(5.0);
  const MelConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(mel_spectrogram(clip.samples, config));
}
BENCHMARK(BM_MelSpectrogram)->Unit(benchmark::kMillisecond);

void BM_Colorize(benchmark::State& state) {
  const AudioClip clip = NoisyClip(5.0);
  const MelSpectrogram spec = normalize_log_normalize(mel_spectrogram(clip.samples, MelConfig{}));
  for (auto _ : state) benchmark::DoNotOptimize(colorize(spec));
}
BENCHMARK(BM_Colorize)->Unit(benchmark::kMicrosecond);

void BM_DetectEvents(benchmark::State& state) {
  const AudioClip clip = NoisyClip(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(detect_events(clip));
}
BENCHMARK(BM_DetectEvents)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_AutoPool(benchmark::State& state) {
  Rng rng(5);
  Matrix probs(kMaxInstances, static_cast<std::size_t>(state.range(0)));
  for (double& v : probs.values()) v = rng.Uniform();
  const std::vector<std::uint8_t> mask = {1, 1, 1, 0, 0};
  for (auto _ : state) benchmark::DoNotOptimize(autopool(probs, mask, 1.5));
}
BENCHMARK(BM_AutoPool)->Arg(4)->Arg(64);

void BM_BackboneForward(benchmark::State& state) {
  const ModelConfig mc = ExperimentConfig{}.model_config(4);
  const ModelParams params = InitParams(mc, 1);
  Rng rng(7);
  const Image img = RandomImage(mc, rng);
  for (auto _ : state) benchmark::DoNotOptimize(backbone_forward(img, params));
}
BENCHMARK(BM_BackboneForward)->Unit(benchmark::kMillisecond);

void BM_BagGradients(benchmark::State& state) {
  const ModelConfig mc = ExperimentConfig{}.model_config(4);
  const ModelParams params = InitParams(mc, 1);
  Rng rng(9);
  std::vector<Image> real;
  for (int i = 0; i < state.range(0); ++i) real.push_back(RandomImage(mc, rng));
  const RecordingBag bag = MakeBag(std::move(real), {1.0, 0.0, 1.0, 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(compute_gradients(bag, params));
}
BENCHMARK(BM_BagGradients)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
