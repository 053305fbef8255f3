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

#ifndef BIRDCOLOR_SYNTH_HPP_
#define BIRDCOLOR_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "birdcolor/audio.hpp"
#include "birdcolor/config.hpp"

namespace birdcolor {

// Frequency trajectory of a single note.
enum class PitchPattern { kMonotone, kUpslurred, kDownslurred, kOverslurred, kUnderslurred };

// Note repetition: series/trill repeat one note, phrase/warble use distinct
// notes; trill and warble run faster than 8 notes per second.
enum class Repetition { kPhrase, kSeries, kWarble, kTrill };

std::string ToString(PitchPattern p);
std::string ToString(Repetition r);
PitchPattern ParsePitchPattern(const std::string& s);
Repetition ParseRepetition(const std::string& s);

// Notes per second for a repetition type.
double NoteRate(Repetition r);

// Relative pitch offset in [-1, 1] at normalised note time tau in [0, 1].
double PitchContour(PitchPattern p, double tau);

struct ClassMotif {
  std::string name;
  PitchPattern pattern = PitchPattern::kMonotone;
  Repetition repetition = Repetition::kSeries;
  double band_hz = 2000.0;  // centre frequency
  bool silent = false;      // class with no vocalisation at all
};

struct SynthSpec {
  std::vector<ClassMotif> classes;
  std::size_t recordings_per_class = 40;
  int sample_rate = kCanonicalSampleRate;
  double noise_level = 0.02;       // std of the white background noise
  double duration_min = 30.0;      // seconds
  double duration_max = 60.0;
  std::size_t bouts_min = 3;
  std::size_t bouts_max = 6;
  double pitch_span_mel = 120.0;   // contour excursion, +- mel
  double band_jitter_mel = 15.0;   // per-recording centre jitter, +- mel
  double mel_low = 300.0;          // bands must lie inside [mel_low, mel_high] Hz
  double mel_high = 16000.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

// `n_classes` classes in shared-motif pairs: classes 2p and 2p+1 use the
// same motif shape at a low and a high band. An odd class count leaves the
// last class with its own motif.
std::vector<ClassMotif> SharedMotifClasses(std::size_t n_classes, double low_band_hz = 1500.0,
                                           double high_band_hz = 6000.0);

// Reads a SynthSpec from a key-value config. Keys: n_classes,
// recordings_per_class, sample_rate, noise_level, duration_min,
// duration_max, bouts_min, bouts_max, pitch_span_mel, band_jitter_mel,
// seed, low_band_hz, high_band_hz and optional per-class overrides
// `class.<k> = <name> <pattern> <repetition> <band_hz>` or
// `class.<k> = <name> silence`. Without overrides the classes follow
// SharedMotifClasses.
SynthSpec SynthSpecFromConfig(const KeyValueConfig& config);

// Renders one bout (a run of notes) centred on band_hz, starting at t = 0.
std::vector<double> RenderBout(const ClassMotif& motif, double band_hz, double pitch_span_mel,
                               int sample_rate, double amplitude);

// Deterministic in (spec.seed, class_index, recording_index).
AudioClip synthesize_recording(const SynthSpec& spec, std::size_t class_index,
                               std::size_t recording_index);

// Writes <out>/<class name>/<class name>_<idx>.wav for every recording.
// Returns the written paths grouped per class.
std::vector<std::vector<std::filesystem::path>> synthesize_dataset(
    const SynthSpec& spec, const std::filesystem::path& out);

}  // namespace birdcolor

#endif  // BIRDCOLOR_SYNTH_HPP_
