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

#include "birdcolor/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <sstream>

#include "birdcolor/error.hpp"
#include "birdcolor/rng.hpp"
#include "birdcolor/spectrogram.hpp"

namespace birdcolor {
namespace {

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finaliser over a simple combination.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::size_t NotesPerBout(Repetition r) {
  switch (r) {
    case Repetition::kPhrase: return 4;
    case Repetition::kSeries: return 5;
    case Repetition::kWarble: return 12;
    case Repetition::kTrill: return 14;
  }
  return 4;
}

}  // namespace

std::string ToString(PitchPattern p) {
  switch (p) {
    case PitchPattern::kMonotone: return "monotone";
    case PitchPattern::kUpslurred: return "upslurred";
    case PitchPattern::kDownslurred: return "downslurred";
    case PitchPattern::kOverslurred: return "overslurred";
    case PitchPattern::kUnderslurred: return "underslurred";
  }
  return "monotone";
}

std::string ToString(Repetition r) {
  switch (r) {
    case Repetition::kPhrase: return "phrase";
    case Repetition::kSeries: return "series";
    case Repetition::kWarble: return "warble";
    case Repetition::kTrill: return "trill";
  }
  return "series";
}

PitchPattern ParsePitchPattern(const std::string& s) {
  for (auto p : {PitchPattern::kMonotone, PitchPattern::kUpslurred, PitchPattern::kDownslurred,
                 PitchPattern::kOverslurred, PitchPattern::kUnderslurred}) {
    if (ToString(p) == s) return p;
  }
  Fail(ErrorCode::kParseError, "unknown pitch pattern '" + s + "'");
}

Repetition ParseRepetition(const std::string& s) {
  for (auto r : {Repetition::kPhrase, Repetition::kSeries, Repetition::kWarble,
                 Repetition::kTrill}) {
    if (ToString(r) == s) return r;
  }
  Fail(ErrorCode::kParseError, "unknown repetition '" + s + "'");
}

double NoteRate(Repetition r) {
  switch (r) {
    case Repetition::kPhrase: return 3.0;
    case Repetition::kSeries: return 4.0;
    case Repetition::kWarble: return 12.0;
    case Repetition::kTrill: return 14.0;
  }
  return 4.0;
}

double PitchContour(PitchPattern p, double tau) {
  switch (p) {
    case PitchPattern::kMonotone: return 0.0;
    case PitchPattern::kUpslurred: return 2.0 * tau - 1.0;
    case PitchPattern::kDownslurred: return 1.0 - 2.0 * tau;
    case PitchPattern::kOverslurred: return 2.0 * std::sin(std::numbers::pi * tau) - 1.0;
    case PitchPattern::kUnderslurred: return 1.0 - 2.0 * std::sin(std::numbers::pi * tau);
  }
  return 0.0;
}

void SynthSpec::Validate() const {
  Require(!classes.empty(), ErrorCode::kInvalidArgument, "synth spec has no classes");
  Require(recordings_per_class >= 1, ErrorCode::kInvalidArgument,
          "recordings_per_class must be >= 1");
  Require(sample_rate > 0, ErrorCode::kInvalidArgument, "sample_rate must be positive");
  Require(noise_level >= 0.0, ErrorCode::kInvalidArgument, "noise_level must be >= 0");
  Require(duration_min > 0.0 && duration_min <= duration_max, ErrorCode::kInvalidArgument,
          "require 0 < duration_min <= duration_max");
  Require(bouts_min <= bouts_max, ErrorCode::kInvalidArgument, "bouts_min > bouts_max");
  for (const auto& c : classes) {
    if (c.silent) continue;
    const double lo = MelToHz(HzToMel(c.band_hz) - pitch_span_mel - band_jitter_mel);
    const double hi = MelToHz(HzToMel(c.band_hz) + pitch_span_mel + band_jitter_mel);
    Require(lo >= mel_low && hi <= std::min(mel_high, sample_rate / 2.0),
            ErrorCode::kInvalidArgument, "class '" + c.name + "' band leaves the mel range");
  }
}

std::vector<ClassMotif> SharedMotifClasses(std::size_t n_classes, double low_band_hz,
                                           double high_band_hz) {
  static const std::pair<PitchPattern, Repetition> kShapes[] = {
      {PitchPattern::kUpslurred, Repetition::kSeries},
      {PitchPattern::kDownslurred, Repetition::kTrill},
      {PitchPattern::kOverslurred, Repetition::kPhrase},
      {PitchPattern::kUnderslurred, Repetition::kWarble},
      {PitchPattern::kMonotone, Repetition::kSeries},
  };
  std::vector<ClassMotif> classes;
  for (std::size_t k = 0; k < n_classes; ++k) {
    const auto& shape = kShapes[(k / 2) % std::size(kShapes)];
    ClassMotif m;
    m.pattern = shape.first;
    m.repetition = shape.second;
    m.band_hz = k % 2 == 0 ? low_band_hz : high_band_hz;
    std::ostringstream name;
    name << "class" << k << "_" << ToString(m.pattern) << "_" << ToString(m.repetition) << "_"
         << static_cast<long>(m.band_hz) << "hz";
    m.name = name.str();
    classes.push_back(m);
  }
  return classes;
}

SynthSpec SynthSpecFromConfig(const KeyValueConfig& config) {
  SynthSpec spec;
  const auto n_classes = static_cast<std::size_t>(config.GetUnsigned("n_classes", 4));
  spec.recordings_per_class =
      static_cast<std::size_t>(config.GetUnsigned("recordings_per_class", 40));
  spec.sample_rate = static_cast<int>(config.GetInt("sample_rate", kCanonicalSampleRate));
  spec.noise_level = config.GetDouble("noise_level", spec.noise_level);
  spec.duration_min = config.GetDouble("duration_min", spec.duration_min);
  spec.duration_max = config.GetDouble("duration_max", spec.duration_max);
  spec.bouts_min = static_cast<std::size_t>(config.GetUnsigned("bouts_min", spec.bouts_min));
  spec.bouts_max = static_cast<std::size_t>(config.GetUnsigned("bouts_max", spec.bouts_max));
  spec.pitch_span_mel = config.GetDouble("pitch_span_mel", spec.pitch_span_mel);
  spec.band_jitter_mel = config.GetDouble("band_jitter_mel", spec.band_jitter_mel);
  spec.seed = config.GetUnsigned("seed", 0);
  spec.classes = SharedMotifClasses(n_classes, config.GetDouble("low_band_hz", 1500.0),
                                    config.GetDouble("high_band_hz", 6000.0));
  for (std::size_t k = 0; k < n_classes; ++k) {
    const auto v = config.Get("class." + std::to_string(k));
    if (!v) continue;
    std::istringstream in(*v);
    ClassMotif m;
    std::string pattern;
    in >> m.name >> pattern;
    if (m.name.empty() || pattern.empty()) {
      Fail(ErrorCode::kParseError, "class." + std::to_string(k) + " needs a name and a pattern");
    }
    if (pattern == "silence") {
      m.silent = true;
    } else {
      std::string repetition;
      in >> repetition >> m.band_hz;
      if (!in) {
        Fail(ErrorCode::kParseError,
             "class." + std::to_string(k) + " expects: <name> <pattern> <repetition> <band_hz>");
      }
      m.pattern = ParsePitchPattern(pattern);
      m.repetition = ParseRepetition(repetition);
    }
    spec.classes[k] = m;
  }
  spec.Validate();
  return spec;
}

std::vector<double> RenderBout(const ClassMotif& motif, double band_hz, double pitch_span_mel,
                               int sample_rate, double amplitude) {
  const double rate = NoteRate(motif.repetition);
  const std::size_t notes = NotesPerBout(motif.repetition);
  const double period = 1.0 / rate;
  const double note_len = 0.6 * period;
  const bool distinct = motif.repetition == Repetition::kPhrase ||
                        motif.repetition == Repetition::kWarble;
  const auto total = static_cast<std::size_t>(std::ceil(period * notes * sample_rate));
  std::vector<double> out(total, 0.0);
  const double center_mel = HzToMel(band_hz);
  const auto note_samples = static_cast<std::size_t>(note_len * sample_rate);
  for (std::size_t k = 0; k < notes; ++k) {
    // Distinct-note motifs step each note through a fixed offset cycle.
    const double offset = distinct ? 0.5 * pitch_span_mel * (static_cast<double>((k * 3) % 5) - 2.0) / 2.0
                                   : 0.0;
    const auto start = static_cast<std::size_t>(static_cast<double>(k) * period * sample_rate);
    double phase = 0.0;
    for (std::size_t i = 0; i < note_samples && start + i < total; ++i) {
      const double tau = static_cast<double>(i) / static_cast<double>(note_samples);
      const double f = MelToHz(center_mel + offset + pitch_span_mel * PitchContour(motif.pattern, tau));
      phase += 2.0 * std::numbers::pi * f / sample_rate;
      const double env = std::sin(std::numbers::pi * tau);
      out[start + i] += amplitude * env * std::sin(phase);
    }
  }
  return out;
}

AudioClip synthesize_recording(const SynthSpec& spec, std::size_t class_index,
                               std::size_t recording_index) {
  Require(class_index < spec.classes.size(), ErrorCode::kInvalidArgument,
          "class index out of range");
  const ClassMotif& motif = spec.classes[class_index];
  Rng rng(MixSeed(spec.seed, class_index, recording_index));

  const double duration = rng.Uniform(spec.duration_min, spec.duration_max);
  const auto n = static_cast<std::size_t>(duration * spec.sample_rate);
  AudioClip clip;
  clip.sample_rate = spec.sample_rate;
  clip.source_id = motif.name + "_" + std::to_string(recording_index);
  clip.samples.assign(n, 0.0);

  if (spec.noise_level > 0.0) {
    // White floor plus low-frequency hum below the high-pass cutoff.
    const double hum_phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / spec.sample_rate;
      clip.samples[i] = spec.noise_level * rng.Normal() +
                        2.0 * spec.noise_level * std::sin(2.0 * std::numbers::pi * 60.0 * t + hum_phase);
    }
  }

  if (!motif.silent) {
    const double band = MelToHz(HzToMel(motif.band_hz) +
                                rng.Uniform(-spec.band_jitter_mel, spec.band_jitter_mel));
    const std::size_t bouts =
        spec.bouts_min + static_cast<std::size_t>(rng.Below(spec.bouts_max - spec.bouts_min + 1));
    // Bouts go into equal slots of the recording at a random offset within each.
    for (std::size_t b = 0; b < bouts; ++b) {
      const double amplitude = rng.Uniform(0.25, 0.6);
      const auto bout = RenderBout(motif, band, spec.pitch_span_mel, spec.sample_rate, amplitude);
      const std::size_t slot = n / std::max<std::size_t>(bouts, 1);
      if (bout.size() >= slot) continue;
      const std::size_t start = b * slot + static_cast<std::size_t>(rng.Below(slot - bout.size()));
      for (std::size_t i = 0; i < bout.size() && start + i < n; ++i) clip.samples[start + i] += bout[i];
    }
  }
  for (double& v : clip.samples) v = std::clamp(v, -1.0, 1.0);
  return clip;
}

std::vector<std::vector<std::filesystem::path>> synthesize_dataset(
    const SynthSpec& spec, const std::filesystem::path& out) {
  spec.Validate();
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) Fail(ErrorCode::kIoError, "cannot create " + out.string() + ": " + ec.message());
  std::vector<std::vector<std::filesystem::path>> written(spec.classes.size());
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    const auto dir = out / spec.classes[c].name;
    std::filesystem::create_directories(dir, ec);
    if (ec) Fail(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
    for (std::size_t r = 0; r < spec.recordings_per_class; ++r) {
      char name[32];
      std::snprintf(name, sizeof(name), "_%04zu.wav", r);
      const auto path = dir / (spec.classes[c].name + name);
      write_wav(path, synthesize_recording(spec, c, r));
      written[c].push_back(path);
    }
  }
  return written;
}

}  // namespace birdcolor
