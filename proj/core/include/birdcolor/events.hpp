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

#ifndef BIRDCOLOR_EVENTS_HPP_
#define BIRDCOLOR_EVENTS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "birdcolor/audio.hpp"

namespace birdcolor {

// Spectral-gating noise reduction parameters.
struct DenoiseConfig {
  std::size_t fft_size = 2048;
  std::size_t hop = 512;
  // Fraction of lowest-energy full frames used to estimate the noise floor.
  double quiet_fraction = 0.10;
  // Gate threshold = floor mean + n_std * floor std, per frequency bin.
  double n_std = 1.5;
  // Width (in bins) of the median filter applied across frequency to the
  // noise profile. The floor is assumed broadband, so narrow tonal peaks
  // are removed from the estimate and survive the gate.
  std::size_t smoothing_bins = 31;
};

// Spectral gating: estimate a per-bin noise floor from the quietest frames,
// shrink every STFT magnitude by the threshold (soft threshold, phase kept)
// and resynthesise by weighted overlap-add. Output has the input's length.
// Throws kTooShort when the clip is shorter than one STFT frame.
AudioClip denoise(const AudioClip& clip, const DenoiseConfig& config = {});

struct EnergyProfile {
  std::vector<double> frame_energies;
  std::size_t frame_length = 0;
  std::size_t hop_length = 0;
  double mean_energy = 0.0;

  // Sample index of the centre of frame k.
  std::size_t frame_center(std::size_t k) const {
    return k * hop_length + frame_length / 2;
  }
};

inline constexpr std::size_t kEnergyFrameLength = 2048;
inline constexpr std::size_t kEnergyHopLength = 512;

// frame_energies[k] = sum of squared samples in [k*hop, k*hop + frame).
EnergyProfile frame_energy(const AudioClip& clip,
                           std::size_t frame_length = kEnergyFrameLength,
                           std::size_t hop_length = kEnergyHopLength);

struct EnergyPeak {
  std::size_t frame_index = 0;
  double energy = 0.0;

  bool operator==(const EnergyPeak&) const = default;
};

// Interior local maxima above the profile mean, strongest first (earlier
// frame first on ties). A flat run of equal values bounded by strictly
// smaller neighbours counts once, at its midpoint (rounded down).
std::vector<EnergyPeak> find_descending_peaks(const EnergyProfile& profile);

struct AcousticEvent {
  std::size_t start_sample = 0;
  std::size_t end_sample = 0;
  std::size_t peak_frame = 0;
  double peak_energy = 0.0;
  // Set when the recording is shorter than the window, so the event spans
  // the whole recording instead of the nominal length.
  bool clamped = false;
  std::vector<double> samples;

  std::size_t length() const { return end_sample - start_sample; }
};

struct EventConfig {
  std::size_t max_events = 5;
  double window_seconds = 5.0;
  double max_overlap = 0.5;
};

// Greedy mining in descending peak order. Each candidate window is centred
// on the peak frame's centre, shifted inward to stay inside the recording,
// and accepted only if it shares at most max_overlap * window with every
// event accepted before it.
std::vector<AcousticEvent> extract_events(const AudioClip& clip,
                                          const EnergyProfile& profile,
                                          const EventConfig& config = {});

// Conditioning chain used ahead of mining: high-pass then spectral gating.
AudioClip condition_for_detection(const AudioClip& clip,
                                  double cutoff_hz = kHighpassCutoffHz,
                                  const DenoiseConfig& denoise_config = {});

// Full detection path: condition, frame energies, peaks, events. Event
// samples are cut from the conditioned signal.
std::vector<AcousticEvent> detect_events(const AudioClip& clip,
                                         const EventConfig& config = {});

// Events manifest: source_id, sample_rate and the event spans.
nlohmann::json events_to_json(const std::string& source_id, int sample_rate,
                              const std::vector<AcousticEvent>& events);

struct EventSpan {
  std::size_t start_sample = 0;
  std::size_t end_sample = 0;
  double peak_energy = 0.0;
};

struct EventsManifest {
  std::string source_id;
  int sample_rate = 0;
  std::vector<EventSpan> events;
};

EventsManifest events_from_json(const nlohmann::json& doc);

}  // namespace birdcolor

#endif  // BIRDCOLOR_EVENTS_HPP_
