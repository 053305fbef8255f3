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

#include <algorithm>
#include <cmath>

#include "birdcolor/audio.hpp"
#include "birdcolor/error.hpp"
#include "birdcolor/events.hpp"
#include "birdcolor/rng.hpp"
#include "birdcolor/synth.hpp"
#include "oracles.hpp"

using namespace birdcolor;

namespace {

AudioClip Clip(std::vector<double> samples, int rate = 32000) {
  AudioClip c;
  c.samples = std::move(samples);
  c.sample_rate = rate;
  return c;
}

// Tone burst of `seconds` centred at `center_s`.
void AddBurst(std::vector<double>& x, double center_s, double seconds, double freq, double amp,
              int rate = 32000) {
  const auto c = static_cast<std::ptrdiff_t>(center_s * rate);
  const auto half = static_cast<std::ptrdiff_t>(seconds * rate / 2);
  for (std::ptrdiff_t i = c - half; i < c + half; ++i) {
    if (i >= 0 && i < static_cast<std::ptrdiff_t>(x.size())) {
      x[static_cast<std::size_t>(i)] += amp * std::sin(2.0 * M_PI * freq * (i - (c - half)) / rate);
    }
  }
}

TEST(Denoise, ReducesWhiteNoise) {
  Rng rng(21);
  std::vector<double> x(32000 * 3);
  for (double& v : x) v = 0.1 * rng.Normal();
  const AudioClip in = Clip(x);
  const AudioClip out = denoise(in);
  ASSERT_EQ(out.samples.size(), in.samples.size());
  EXPECT_LE(rms(out.samples), 0.5 * rms(in.samples));
}

TEST(Denoise, PreservesCleanTone) {
  const AudioClip in = Clip(oracle::Sine(2000.0, 32000, 32000 * 3, 0.5));
  const AudioClip out = denoise(in);
  EXPECT_NEAR(rms(out.samples) / rms(in.samples), 1.0, 0.10);
}

TEST(Denoise, SilenceAndTooShort) {
  const AudioClip out = denoise(Clip(std::vector<double>(10000, 0.0)));
  for (double v : out.samples) EXPECT_EQ(v, 0.0);
  try {
    denoise(Clip(std::vector<double>(100, 0.1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooShort);
  }
}

TEST(FrameEnergy, Examples) {
  const EnergyProfile zero = frame_energy(Clip(std::vector<double>(5000, 0.0)), 256, 128);
  for (double e : zero.frame_energies) EXPECT_EQ(e, 0.0);
  EXPECT_EQ(zero.mean_energy, 0.0);

  const EnergyProfile ones = frame_energy(Clip(std::vector<double>(5000, 1.0)), 256, 100);
  for (double e : ones.frame_energies) EXPECT_DOUBLE_EQ(e, 256.0);

  const EnergyProfile pair = frame_energy(Clip({0.3, 0.4}), 2, 1);
  ASSERT_EQ(pair.frame_energies.size(), 1u);
  EXPECT_NEAR(pair.frame_energies[0], 0.25, 1e-15);

  EXPECT_THROW(frame_energy(Clip({0.1}), 2, 1), Error);
}

TEST(FrameEnergy, MatchesDirectSumAndMean) {
  Rng rng(5);
  std::vector<double> x(3000);
  for (double& v : x) v = rng.Normal();
  const EnergyProfile p = frame_energy(Clip(x), 300, 70);
  ASSERT_EQ(p.frame_energies.size(), 1 + (3000 - 300) / 70u);
  double total = 0.0;
  for (std::size_t k = 0; k < p.frame_energies.size(); ++k) {
    double e = 0.0;
    for (std::size_t i = k * 70; i < k * 70 + 300; ++i) e += x[i] * x[i];
    EXPECT_NEAR(p.frame_energies[k], e, 1e-9 * e);
    total += p.frame_energies[k];
  }
  EXPECT_NEAR(p.mean_energy, total / p.frame_energies.size(), 1e-9 * p.mean_energy);
}

EnergyProfile Profile(std::vector<double> e) {
  EnergyProfile p;
  p.frame_energies = std::move(e);
  double s = 0.0;
  for (double v : p.frame_energies) s += v;
  p.mean_energy = s / p.frame_energies.size();
  p.frame_length = 4;
  p.hop_length = 2;
  return p;
}

// Brute-force scan: interior strict maxima, plateaus collapse to their
// (lower) midpoint, then stable sort by energy.
std::vector<EnergyPeak> BrutePeaks(const EnergyProfile& p) {
  const auto& e = p.frame_energies;
  std::vector<EnergyPeak> out;
  for (std::size_t a = 1; a + 1 < e.size(); ++a) {
    std::size_t b = a;
    while (b + 1 < e.size() && e[b + 1] == e[a]) ++b;
    if (b + 1 < e.size() && e[a - 1] < e[a] && e[b + 1] < e[a] && e[a] > p.mean_energy &&
        (a == 1 || e[a - 1] != e[a])) {
      out.push_back({(a + b) / 2, e[a]});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EnergyPeak& x, const EnergyPeak& y) { return x.energy > y.energy; });
  return out;
}

TEST(Peaks, Examples) {
  const auto peaks = find_descending_peaks(Profile({1, 5, 1, 3, 1}));
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_EQ(peaks[0], (EnergyPeak{1, 5.0}));
  EXPECT_EQ(peaks[1], (EnergyPeak{3, 3.0}));
  EXPECT_TRUE(find_descending_peaks(Profile({1, 2, 3, 4, 5})).empty());
  EXPECT_TRUE(find_descending_peaks(Profile({4, 4, 4})).empty());
  EXPECT_TRUE(find_descending_peaks(Profile({7})).empty());
}

TEST(Peaks, PlateauAndTieOrder) {
  // Plateau over frames 2..4 -> midpoint 3; equal peaks keep frame order.
  const auto peaks = find_descending_peaks(Profile({0, 1, 6, 6, 6, 1, 6, 0, 0, 0}));
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_EQ(peaks[0].frame_index, 3u);
  EXPECT_EQ(peaks[1].frame_index, 6u);
}

TEST(Peaks, MatchesBruteForceOnRandomProfiles) {
  Rng rng(77);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> e(3 + rng.Below(30));
    for (double& v : e) v = static_cast<double>(rng.Below(5));
    const EnergyProfile p = Profile(e);
    EXPECT_EQ(find_descending_peaks(p), BrutePeaks(p)) << "trial " << trial;
  }
}

TEST(Extract, SingleBurstGivesOneCenteredEvent) {
  // One energy frame long, so exactly one frame holds the whole burst.
  std::vector<double> x(32000 * 20, 0.0);
  AddBurst(x, 10.0, 2048.0 / 32000, 3000.0, 0.8);
  const auto events = detect_events(Clip(x));
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].start_sample, 240000u);
  EXPECT_EQ(events[0].end_sample, 400000u);
  EXPECT_EQ(events[0].length(), 5u * 32000);
  EXPECT_FALSE(events[0].clamped);
  EXPECT_EQ(events[0].samples.size(), events[0].length());
}

TEST(Extract, TwoBurstsTenSecondsApart) {
  std::vector<double> x(32000 * 30, 0.0);
  AddBurst(x, 10.0, 0.2, 3000.0, 0.8);
  AddBurst(x, 20.0, 0.2, 3000.0, 0.8);
  auto events = detect_events(Clip(x));
  ASSERT_EQ(events.size(), 2u);
  std::sort(events.begin(), events.end(),
            [](const auto& a, const auto& b) { return a.start_sample < b.start_sample; });
  EXPECT_LE(events[0].end_sample, events[1].start_sample);
}

TEST(Extract, SilenceGivesNothing) {
  EXPECT_TRUE(detect_events(Clip(std::vector<double>(32000 * 8, 0.0))).empty());
}

TEST(Extract, ShortRecordingIsClamped) {
  std::vector<double> x(32000 * 3, 0.0);
  AddBurst(x, 1.5, 0.2, 3000.0, 0.8);
  const auto events = detect_events(Clip(x));
  ASSERT_EQ(events.size(), 1u);
  EXPECT_TRUE(events[0].clamped);
  EXPECT_EQ(events[0].start_sample, 0u);
  EXPECT_EQ(events[0].end_sample, x.size());
}

TEST(Extract, BoundaryPeakShiftsWindowInward) {
  std::vector<double> x(32000 * 20, 0.0);
  AddBurst(x, 0.5, 0.2, 3000.0, 0.8);
  const auto events = detect_events(Clip(x));
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].start_sample, 0u);
  EXPECT_EQ(events[0].length(), 5u * 32000);
}

TEST(Extract, ContractsOnSyntheticRecordings) {
  SynthSpec spec;
  spec.classes = SharedMotifClasses(4);
  spec.recordings_per_class = 2;
  for (std::size_t c = 0; c < 4; ++c) {
    const AudioClip clip = synthesize_recording(spec, c, 1);
    const AudioClip cond = condition_for_detection(clip);
    const EnergyProfile profile = frame_energy(cond);
    const auto events = extract_events(cond, profile);
    ASSERT_FALSE(events.empty());
    EXPECT_LE(events.size(), 5u);
    for (std::size_t i = 0; i < events.size(); ++i) {
      EXPECT_EQ(events[i].length(), 5u * 32000);
      EXPECT_GT(events[i].peak_energy, profile.mean_energy);
      if (i > 0) EXPECT_GE(events[i - 1].peak_energy, events[i].peak_energy);
      for (std::size_t j = 0; j < i; ++j) {
        const auto lo = std::max(events[i].start_sample, events[j].start_sample);
        const auto hi = std::min(events[i].end_sample, events[j].end_sample);
        EXPECT_LE(hi > lo ? hi - lo : 0, 80000u);
      }
    }
    const auto again = extract_events(cond, profile);
    ASSERT_EQ(again.size(), events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
      EXPECT_EQ(again[i].start_sample, events[i].start_sample);
      EXPECT_EQ(again[i].samples, events[i].samples);
    }
  }
}

TEST(Extract, RespectsConfig) {
  SynthSpec spec;
  spec.classes = SharedMotifClasses(2);
  const AudioClip cond = condition_for_detection(synthesize_recording(spec, 0, 0));
  const EnergyProfile profile = frame_energy(cond);
  EventConfig cfg;
  cfg.max_events = 2;
  cfg.window_seconds = 1.0;
  cfg.max_overlap = 0.0;
  const auto events = extract_events(cond, profile, cfg);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].length(), 32000u);
  EXPECT_TRUE(events[0].end_sample <= events[1].start_sample ||
              events[1].end_sample <= events[0].start_sample);
  cfg.max_overlap = 2.0;
  EXPECT_THROW(extract_events(cond, profile, cfg), Error);
}

TEST(EventsJson, RoundTrip) {
  std::vector<AcousticEvent> events(2);
  events[0].start_sample = 10;
  events[0].end_sample = 20;
  events[0].peak_energy = 3.5;
  events[1].start_sample = 30;
  events[1].end_sample = 45;
  events[1].peak_energy = 1.25;
  const EventsManifest m = events_from_json(events_to_json("a.wav", 32000, events));
  EXPECT_EQ(m.source_id, "a.wav");
  EXPECT_EQ(m.sample_rate, 32000);
  ASSERT_EQ(m.events.size(), 2u);
  EXPECT_EQ(m.events[1].end_sample, 45u);
  EXPECT_EQ(m.events[0].peak_energy, 3.5);
  EXPECT_THROW(events_from_json(nlohmann::json{{"events", 3}}), Error);
}

}  // namespace
