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

#ifndef BIRDCOLOR_AUDIO_HPP_
#define BIRDCOLOR_AUDIO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace birdcolor {

// Pipeline sample rate unless a config overrides it.
inline constexpr int kCanonicalSampleRate = 32000;
// High-pass cutoff applied before event mining.
inline constexpr double kHighpassCutoffHz = 300.0;

// Mono recording. Samples lie in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kCanonicalSampleRate;
  std::string source_id;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class WavSampleFormat { kInt8, kInt16, kInt24, kInt32, kFloat32 };

// Decodes a RIFF/WAVE file. Integer PCM (8/16/24/32 bit), IEEE float32 and
// WAVE_FORMAT_EXTENSIBLE wrappers of either are accepted; channels are
// averaged to mono. Throws Error with kIoError (unreadable / malformed),
// kUnsupportedFormat (any other codec) or kEmptyAudio (no frames).
AudioClip load_wav(const std::filesystem::path& path);

// Writes a mono clip. Samples are clipped to [-1, 1] before quantisation.
void write_wav(const std::filesystem::path& path, const AudioClip& clip,
               WavSampleFormat format = WavSampleFormat::kInt16);

// Writes interleaved multi-channel frames; used by tests to build fixtures.
void write_wav_channels(const std::filesystem::path& path,
                        const std::vector<std::vector<double>>& channels,
                        int sample_rate, WavSampleFormat format);

// Band-limited resampling with a Kaiser-windowed sinc kernel.
//
// Quality: 32 zero crossings each side of the (possibly widened) kernel,
// Kaiser beta 9.0 (~ -90 dB sidelobes), cutoff at 0.95 of the lower of the
// two Nyquist rates. Output length is round(n * target / source). Samples
// within one kernel half-width of either end see a truncated kernel.
// Same-rate calls return the input unchanged.
AudioClip resample(const AudioClip& clip, int target_rate);

// Zero-phase 4th-order Butterworth high-pass: two biquad sections run
// forward then backward over an odd-extended signal with steady-state
// initial conditions. Magnitude response is |H(f)|^2 of the 4th-order
// design, i.e. 1 / (1 + (fc/f)^8). Requires 0 < cutoff < rate/2.
AudioClip highpass(const AudioClip& clip, double cutoff_hz);

// Root-mean-square of a sample sequence; 0 for empty input.
double rms(const std::vector<double>& samples);

}  // namespace birdcolor

#endif  // BIRDCOLOR_AUDIO_HPP_
