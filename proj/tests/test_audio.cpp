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
#include <filesystem>

#include "birdcolor/audio.hpp"
#include "birdcolor/error.hpp"
#include "birdcolor/rng.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace birdcolor;

namespace {

fs::path TempPath(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "birdcolor_test_audio";
  fs::create_directories(dir);
  return dir / name;
}

TEST(LoadWav, StereoIdenticalChannelsAveragesToHalf) {
  const fs::path p = TempPath("stereo.wav");
  oracle::WritePcmWav(p, 32000, 2, 16, std::vector<std::int32_t>(2 * 100, 16384));
  const AudioClip clip = load_wav(p);
  ASSERT_EQ(clip.samples.size(), 100u);
  EXPECT_EQ(clip.sample_rate, 32000);
  for (double v : clip.samples) EXPECT_NEAR(v, 0.5, 1e-12);
}

TEST(LoadWav, SilenceOneSecond) {
  const fs::path p = TempPath("zero.wav");
  oracle::WritePcmWav(p, 32000, 1, 16, std::vector<std::int32_t>(32000, 0));
  const AudioClip clip = load_wav(p);
  ASSERT_EQ(clip.samples.size(), 32000u);
  for (double v : clip.samples) EXPECT_EQ(v, 0.0);
}

TEST(LoadWav, TwentyFourBitRampIsBitExact) {
  const fs::path p = TempPath("ramp24.wav");
  std::vector<std::int32_t> ramp;
  for (std::int32_t v = -(1 << 23); v < (1 << 23); v += 4099) ramp.push_back(v);
  ramp.push_back((1 << 23) - 1);
  oracle::WritePcmWav(p, 44100, 1, 24, ramp);
  const AudioClip clip = load_wav(p);
  ASSERT_EQ(clip.samples.size(), ramp.size());
  for (std::size_t i = 0; i < ramp.size(); ++i) {
    EXPECT_EQ(clip.samples[i], ramp[i] / 8388608.0) << i;
  }
}

TEST(WavRoundTrip, AllFormats) {
  Rng rng(4);
  AudioClip clip;
  clip.sample_rate = 22050;
  for (int i = 0; i < 500; ++i) clip.samples.push_back(rng.Uniform(-0.99, 0.99));
  const struct {
    WavSampleFormat format;
    double tol;
  } cases[] = {{WavSampleFormat::kInt8, 1.0 / 128},
               {WavSampleFormat::kInt16, 1.0 / 32768},
               {WavSampleFormat::kInt24, 1.0 / 8388608},
               {WavSampleFormat::kInt32, 1e-9},
               {WavSampleFormat::kFloat32, 1e-7}};
  for (const auto& c : cases) {
    const fs::path p = TempPath("rt.wav");
    write_wav(p, clip, c.format);
    const AudioClip back = load_wav(p);
    ASSERT_EQ(back.samples.size(), clip.samples.size());
    EXPECT_EQ(back.sample_rate, 22050);
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
      EXPECT_NEAR(back.samples[i], clip.samples[i], c.tol);
    }
  }
}

TEST(LoadWav, Errors) {
  try {
    load_wav(TempPath("does_not_exist.wav"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
  const fs::path junk = TempPath("junk.wav");
  { std::ofstream(junk) << "this is not a wave file at all"; }
  try {
    load_wav(junk);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
  const fs::path adpcm = TempPath("adpcm.wav");
  oracle::WritePcmWav(adpcm, 32000, 1, 16, std::vector<std::int32_t>(10, 0), 2);
  try {
    load_wav(adpcm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedFormat);
  }
  const fs::path empty = TempPath("empty.wav");
  oracle::WritePcmWav(empty, 32000, 1, 16, {});
  try {
    load_wav(empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyAudio);
  }
}

TEST(Resample, SameRateIsIdentity) {
  Rng rng(1);
  AudioClip clip;
  for (int i = 0; i < 1000; ++i) clip.samples.push_back(rng.Normal());
  const AudioClip out = resample(clip, 32000);
  EXPECT_EQ(out.samples, clip.samples);
}

TEST(Resample, SineFrom48kMatchesAnalytic) {
  AudioClip clip;
  clip.sample_rate = 48000;
  clip.samples = oracle::Sine(1000.0, 48000, 48000);
  const AudioClip out = resample(clip, 32000);
  ASSERT_EQ(out.sample_rate, 32000);
  ASSERT_EQ(out.samples.size(), 32000u);
  const auto ref = oracle::Sine(1000.0, 32000, 32000);
  // Samples whose kernel reaches past either end see zero padding.
  const std::size_t edge = 64;
  double worst = 0.0;
  for (std::size_t i = edge; i + edge < ref.size(); ++i) {
    worst = std::max(worst, std::abs(out.samples[i] - ref[i]));
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(Resample, SilenceFrom44100) {
  AudioClip clip;
  clip.sample_rate = 44100;
  clip.samples.assign(44100, 0.0);
  const AudioClip out = resample(clip, 32000);
  ASSERT_EQ(out.samples.size(), 32000u);
  for (double v : out.samples) EXPECT_EQ(v, 0.0);
}

TEST(Resample, UpsamplingSine) {
  AudioClip clip;
  clip.sample_rate = 22050;
  clip.samples = oracle::Sine(440.0, 22050, 22050);
  const AudioClip out = resample(clip, 32000);
  const auto ref = oracle::Sine(440.0, 32000, out.samples.size());
  double worst = 0.0;
  for (std::size_t i = 100; i + 100 < ref.size(); ++i) {
    worst = std::max(worst, std::abs(out.samples[i] - ref[i]));
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(Highpass, RemovesDc) {
  AudioClip clip;
  clip.samples.assign(32000, 0.5);
  EXPECT_LT(rms(highpass(clip, 300.0).samples), 0.01);
}

TEST(Highpass, PassesOneKilohertz) {
  AudioClip clip;
  clip.samples = oracle::Sine(1000.0, 32000, 32000);
  const double in = rms(clip.samples);
  const double out = rms(highpass(clip, 300.0).samples);
  EXPECT_NEAR(out / in, 1.0, 0.05);
}

TEST(Highpass, AttenuatesHundredHertz) {
  AudioClip clip;
  clip.samples = oracle::Sine(100.0, 32000, 32000);
  EXPECT_LT(rms(highpass(clip, 300.0).samples), 0.25 * rms(clip.samples));
}

TEST(Highpass, LinearAndLengthPreserving) {
  Rng rng(9);
  AudioClip x, y, mix;
  for (int i = 0; i < 5000; ++i) {
    x.samples.push_back(rng.Normal());
    y.samples.push_back(rng.Uniform(-1, 1));
  }
  const double a = 0.7, b = -1.3;
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    mix.samples.push_back(a * x.samples[i] + b * y.samples[i]);
  }
  const auto hx = highpass(x, 300.0).samples;
  const auto hy = highpass(y, 300.0).samples;
  const auto hm = highpass(mix, 300.0).samples;
  ASSERT_EQ(hm.size(), mix.samples.size());
  for (std::size_t i = 0; i < hm.size(); ++i) EXPECT_NEAR(hm[i], a * hx[i] + b * hy[i], 1e-9);
}

TEST(Highpass, ShortInputs) {
  AudioClip one;
  one.samples = {0.25};
  EXPECT_EQ(highpass(one, 300.0).samples.size(), 1u);
  EXPECT_TRUE(highpass(AudioClip{}, 300.0).samples.empty());
  AudioClip clip;
  clip.samples.assign(100, 1.0);
  EXPECT_THROW(highpass(clip, 20000.0), Error);  // above Nyquist
}

}  // namespace
