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

#include "birdcolor/events.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "birdcolor/error.hpp"
#include "birdcolor/fft.hpp"

namespace birdcolor {
namespace {

std::vector<double> MedianFilter(const std::vector<double>& x, std::size_t width) {
  if (width <= 1 || x.empty()) return x;
  const std::size_t half = width / 2;
  std::vector<double> out(x.size());
  std::vector<double> buf;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(x.size(), i + half + 1);
    buf.assign(x.begin() + static_cast<std::ptrdiff_t>(lo),
               x.begin() + static_cast<std::ptrdiff_t>(hi));
    auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
    std::nth_element(buf.begin(), mid, buf.end());
    out[i] = *mid;
  }
  return out;
}

}  // namespace

AudioClip denoise(const AudioClip& clip, const DenoiseConfig& config) {
  const std::size_t n = clip.samples.size();
  const std::size_t size = config.fft_size;
  const std::size_t hop = config.hop;
  Require(hop >= 1 && hop <= size, ErrorCode::kInvalidArgument, "invalid denoise hop");
  Require(n >= size, ErrorCode::kTooShort, "clip shorter than one STFT frame");

  // Frames start at -size/2 + k*hop (zero padded) so every sample is covered.
  const std::size_t lead = size / 2;
  const std::size_t n_frames = (n + lead) / hop + 1;
  const std::vector<double> window = HannWindow(size);
  RealFft fft(size);
  const std::size_t bins = fft.bins();

  std::vector<std::vector<std::complex<double>>> stft(
      n_frames, std::vector<std::complex<double>>(bins));
  std::vector<double> frame(size);
  auto sample_at = [&](std::ptrdiff_t idx) {
    return idx >= 0 && static_cast<std::size_t>(idx) < n ? clip.samples[static_cast<std::size_t>(idx)]
                                                         : 0.0;
  };
  std::vector<std::size_t> full_frames;
  std::vector<double> frame_power(n_frames, 0.0);
  for (std::size_t k = 0; k < n_frames; ++k) {
    const auto start = static_cast<std::ptrdiff_t>(k * hop) - static_cast<std::ptrdiff_t>(lead);
    for (std::size_t i = 0; i < size; ++i) {
      frame[i] = window[i] * sample_at(start + static_cast<std::ptrdiff_t>(i));
    }
    fft.Forward(frame, stft[k]);
    if (start >= 0 && static_cast<std::size_t>(start) + size <= n) {
      full_frames.push_back(k);
      double p = 0.0;
      for (const auto& c : stft[k]) p += std::norm(c);
      frame_power[k] = p;
    }
  }

  // Noise statistics over the quietest full frames.
  std::vector<std::size_t> order = full_frames;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return frame_power[a] < frame_power[b];
  });
  const std::size_t n_quiet = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(config.quiet_fraction * order.size())));
  std::vector<double> mean(bins, 0.0);
  std::vector<double> sq(bins, 0.0);
  for (std::size_t q = 0; q < n_quiet; ++q) {
    const auto& spec = stft[order[q]];
    for (std::size_t b = 0; b < bins; ++b) {
      const double m = std::abs(spec[b]);
      mean[b] += m;
      sq[b] += m * m;
    }
  }
  std::vector<double> threshold(bins);
  std::vector<double> spread(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    mean[b] /= static_cast<double>(n_quiet);
    spread[b] = std::sqrt(std::max(0.0, sq[b] / static_cast<double>(n_quiet) - mean[b] * mean[b]));
  }
  mean = MedianFilter(mean, config.smoothing_bins);
  spread = MedianFilter(spread, config.smoothing_bins);
  for (std::size_t b = 0; b < bins; ++b) threshold[b] = mean[b] + config.n_std * spread[b];

  // Soft threshold on magnitudes, then weighted overlap-add.
  std::vector<double> acc(n + lead + size, 0.0);
  std::vector<double> norm(n + lead + size, 0.0);
  std::vector<double> out_frame(size);
  for (std::size_t k = 0; k < n_frames; ++k) {
    auto& spec = stft[k];
    for (std::size_t b = 0; b < bins; ++b) {
      const double m = std::abs(spec[b]);
      const double kept = std::max(0.0, m - threshold[b]);
      spec[b] = m > 0.0 ? spec[b] * (kept / m) : std::complex<double>(0.0, 0.0);
    }
    fft.Inverse(spec, out_frame);
    const std::size_t base = k * hop;  // index into acc, which is offset by lead
    for (std::size_t i = 0; i < size; ++i) {
      acc[base + i] += out_frame[i] / static_cast<double>(size);
      norm[base + i] += window[i];
    }
  }

  AudioClip out = clip;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = norm[i + lead];
    out.samples[i] = w > 1e-8 ? acc[i + lead] / w : 0.0;
  }
  return out;
}

EnergyProfile frame_energy(const AudioClip& clip, std::size_t frame_length,
                           std::size_t hop_length) {
  Require(frame_length >= 1 && hop_length >= 1, ErrorCode::kInvalidArgument,
          "frame and hop lengths must be positive");
  const std::size_t n = clip.samples.size();
  Require(n >= frame_length, ErrorCode::kTooShort, "clip shorter than one energy frame");

  EnergyProfile profile;
  profile.frame_length = frame_length;
  profile.hop_length = hop_length;
  const std::size_t n_frames = (n - frame_length) / hop_length + 1;
  profile.frame_energies.resize(n_frames);
  for (std::size_t k = 0; k < n_frames; ++k) {
    double e = 0.0;
    const double* p = clip.samples.data() + k * hop_length;
    for (std::size_t i = 0; i < frame_length; ++i) e += p[i] * p[i];
    profile.frame_energies[k] = e;
  }
  profile.mean_energy =
      std::accumulate(profile.frame_energies.begin(), profile.frame_energies.end(), 0.0) /
      static_cast<double>(n_frames);
  return profile;
}

std::vector<EnergyPeak> find_descending_peaks(const EnergyProfile& profile) {
  const auto& e = profile.frame_energies;
  std::vector<EnergyPeak> peaks;
  if (e.size() < 3) return peaks;
  std::size_t i = 1;
  while (i + 1 < e.size()) {
    if (e[i - 1] < e[i]) {
      std::size_t ahead = i + 1;
      while (ahead < e.size() && e[ahead] == e[i]) ++ahead;
      if (ahead < e.size() && e[ahead] < e[i]) {
        const std::size_t mid = (i + ahead - 1) / 2;
        if (e[i] > profile.mean_energy) peaks.push_back({mid, e[i]});
        i = ahead;
        continue;
      }
      i = ahead;
      continue;
    }
    ++i;
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const EnergyPeak& a, const EnergyPeak& b) {
    return a.energy > b.energy;
  });
  return peaks;
}

std::vector<AcousticEvent> extract_events(const AudioClip& clip, const EnergyProfile& profile,
                                          const EventConfig& config) {
  Require(config.window_seconds > 0.0, ErrorCode::kInvalidArgument, "window must be positive");
  Require(config.max_overlap >= 0.0 && config.max_overlap <= 1.0, ErrorCode::kInvalidArgument,
          "max_overlap must lie in [0, 1]");
  const std::size_t n = clip.samples.size();
  const auto window = static_cast<std::size_t>(
      std::llround(config.window_seconds * clip.sample_rate));
  const double allowed = config.max_overlap * static_cast<double>(window);

  std::vector<AcousticEvent> accepted;
  if (n == 0 || config.max_events == 0) return accepted;
  for (const EnergyPeak& peak : find_descending_peaks(profile)) {
    if (accepted.size() >= config.max_events) break;
    AcousticEvent ev;
    ev.peak_frame = peak.frame_index;
    ev.peak_energy = peak.energy;
    if (window >= n) {
      ev.start_sample = 0;
      ev.end_sample = n;
      ev.clamped = window > n;
    } else {
      const std::size_t center = profile.frame_center(peak.frame_index);
      const std::size_t half = window / 2;
      std::size_t start = center > half ? center - half : 0;
      start = std::min(start, n - window);
      ev.start_sample = start;
      ev.end_sample = start + window;
    }
    const bool fits = std::all_of(accepted.begin(), accepted.end(), [&](const AcousticEvent& a) {
      const std::size_t lo = std::max(a.start_sample, ev.start_sample);
      const std::size_t hi = std::min(a.end_sample, ev.end_sample);
      const double shared = hi > lo ? static_cast<double>(hi - lo) : 0.0;
      return shared <= allowed;
    });
    if (!fits) continue;
    ev.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(ev.start_sample),
                      clip.samples.begin() + static_cast<std::ptrdiff_t>(ev.end_sample));
    accepted.push_back(std::move(ev));
  }
  return accepted;
}

AudioClip condition_for_detection(const AudioClip& clip, double cutoff_hz,
                                  const DenoiseConfig& denoise_config) {
  return denoise(highpass(clip, cutoff_hz), denoise_config);
}

std::vector<AcousticEvent> detect_events(const AudioClip& clip, const EventConfig& config) {
  const AudioClip conditioned = condition_for_detection(clip);
  const EnergyProfile profile = frame_energy(conditioned);
  return extract_events(conditioned, profile, config);
}

nlohmann::json events_to_json(const std::string& source_id, int sample_rate,
                              const std::vector<AcousticEvent>& events) {
  nlohmann::json doc;
  doc["source_id"] = source_id;
  doc["sample_rate"] = sample_rate;
  auto list = nlohmann::json::array();
  for (const auto& ev : events) {
    list.push_back({{"start_sample", ev.start_sample},
                    {"end_sample", ev.end_sample},
                    {"peak_energy", ev.peak_energy}});
  }
  doc["events"] = std::move(list);
  return doc;
}

EventsManifest events_from_json(const nlohmann::json& doc) {
  try {
    EventsManifest m;
    m.source_id = doc.at("source_id").get<std::string>();
    m.sample_rate = doc.at("sample_rate").get<int>();
    for (const auto& e : doc.at("events")) {
      m.events.push_back({e.at("start_sample").get<std::size_t>(),
                          e.at("end_sample").get<std::size_t>(),
                          e.at("peak_energy").get<double>()});
    }
    return m;
  } catch (const nlohmann::json::exception& ex) {
    Fail(ErrorCode::kParseError, std::string("malformed events manifest: ") + ex.what());
  }
}

}  // namespace birdcolor
