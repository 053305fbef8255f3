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

#include "birdcolor/audio.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>

#include "birdcolor/error.hpp"

namespace birdcolor {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutU16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

double DecodeSample(const unsigned char* p, int bits, bool is_float) {
  if (is_float) {
    const std::uint32_t raw = ReadU32(p);
    const float f = std::bit_cast<float>(raw);
    if (!std::isfinite(f)) Fail(ErrorCode::kNonFinite, "non-finite float sample");
    return std::clamp(static_cast<double>(f), -1.0, 1.0);
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(ReadU16(p)) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32:
      return static_cast<std::int32_t>(ReadU32(p)) / 2147483648.0;
    default:
      Fail(ErrorCode::kUnsupportedFormat, "unsupported bit depth " + std::to_string(bits));
  }
}

int BitsOf(WavSampleFormat format) {
  switch (format) {
    case WavSampleFormat::kInt8: return 8;
    case WavSampleFormat::kInt16: return 16;
    case WavSampleFormat::kInt24: return 24;
    case WavSampleFormat::kInt32: return 32;
    case WavSampleFormat::kFloat32: return 32;
  }
  return 16;
}

void EncodeSample(std::string& out, double v, WavSampleFormat format) {
  v = std::clamp(v, -1.0, 1.0);
  switch (format) {
    case WavSampleFormat::kInt8: {
      const long q = std::lround(v * 128.0) + 128;
      out.push_back(static_cast<char>(std::clamp(q, 0L, 255L)));
      break;
    }
    case WavSampleFormat::kInt16: {
      const long q = std::clamp(std::lround(v * 32768.0), -32768L, 32767L);
      PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
      break;
    }
    case WavSampleFormat::kInt24: {
      const long q = std::clamp(std::lround(v * 8388608.0), -8388608L, 8388607L);
      const auto u = static_cast<std::uint32_t>(static_cast<std::int32_t>(q));
      out.push_back(static_cast<char>(u & 0xFF));
      out.push_back(static_cast<char>((u >> 8) & 0xFF));
      out.push_back(static_cast<char>((u >> 16) & 0xFF));
      break;
    }
    case WavSampleFormat::kInt32: {
      const long long q =
          std::clamp(std::llround(v * 2147483648.0), -2147483648LL, 2147483647LL);
      PutU32(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(q)));
      break;
    }
    case WavSampleFormat::kFloat32:
      PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      break;
  }
}

// Zeroth-order modified Bessel function of the first kind.
double BesselI0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

struct Biquad {
  double b0, b1, b2, a1, a2;
};

// Sections of a 4th-order Butterworth high-pass (bilinear transform with
// pre-warping). The two Q values are those of the analog prototype poles.
std::array<Biquad, 2> DesignButterworthHighpass(double cutoff_hz, int sample_rate) {
  const std::array<double, 2> qs = {1.0 / (2.0 * std::cos(std::numbers::pi / 8.0)),
                                    1.0 / (2.0 * std::cos(3.0 * std::numbers::pi / 8.0))};
  const double w0 = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
  const double cw = std::cos(w0);
  const double sw = std::sin(w0);
  std::array<Biquad, 2> sections{};
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const double alpha = sw / (2.0 * qs[i]);
    const double a0 = 1.0 + alpha;
    sections[i] = {(1.0 + cw) / 2.0 / a0, -(1.0 + cw) / a0, (1.0 + cw) / 2.0 / a0,
                   -2.0 * cw / a0, (1.0 - alpha) / a0};
  }
  return sections;
}

// Runs the cascade in place (transposed direct form II). Initial state is
// the steady state for a constant input equal to x.front().
void FilterCascade(const std::array<Biquad, 2>& sections, std::vector<double>& x) {
  if (x.empty()) return;
  double level = x.front();
  for (const Biquad& s : sections) {
    const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    double z2 = (s.b2 - s.a2 * gain) * level;
    double z1 = (s.b1 - s.a1 * gain) * level + z2;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
    level *= gain;
  }
}

}  // namespace

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    Fail(ErrorCode::kIoError, "not a RIFF/WAVE file: " + path.string());
  }

  bool have_fmt = false;
  std::uint16_t format_tag = 0;
  int channels = 0;
  int sample_rate = 0;
  int bits = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > available) Fail(ErrorCode::kIoError, "truncated fmt chunk");
      const unsigned char* f = bytes.data() + body;
      format_tag = ReadU16(f);
      channels = ReadU16(f + 2);
      sample_rate = static_cast<int>(ReadU32(f + 4));
      bits = ReadU16(f + 14);
      if (format_tag == kFormatExtensible) {
        if (size < 40) Fail(ErrorCode::kIoError, "truncated extensible fmt chunk");
        // First two bytes of the sub-format GUID carry the real tag.
        format_tag = ReadU16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = std::min<std::size_t>(size, available);
    }
    pos = body + size + (size & 1U);
  }

  if (!have_fmt || data == nullptr) Fail(ErrorCode::kIoError, "missing fmt or data chunk");
  if (format_tag != kFormatPcm && format_tag != kFormatFloat) {
    Fail(ErrorCode::kUnsupportedFormat,
         "unsupported WAV codec tag " + std::to_string(format_tag));
  }
  const bool is_float = format_tag == kFormatFloat;
  if (is_float && bits != 32) Fail(ErrorCode::kUnsupportedFormat, "only 32-bit float supported");
  if (!is_float && bits != 8 && bits != 16 && bits != 24 && bits != 32) {
    Fail(ErrorCode::kUnsupportedFormat, "unsupported bit depth " + std::to_string(bits));
  }
  if (channels < 1 || sample_rate <= 0) Fail(ErrorCode::kIoError, "invalid fmt fields");

  const std::size_t bytes_per_sample = static_cast<std::size_t>(bits / 8);
  const std::size_t frame_bytes = bytes_per_sample * static_cast<std::size_t>(channels);
  const std::size_t frames = data_size / frame_bytes;
  if (frames == 0) Fail(ErrorCode::kEmptyAudio, "no audio frames in " + path.string());

  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.source_id = path.string();
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      acc += DecodeSample(data + i * frame_bytes + c * bytes_per_sample, bits, is_float);
    }
    clip.samples[i] = acc / channels;
  }
  return clip;
}

void write_wav_channels(const std::filesystem::path& path,
                        const std::vector<std::vector<double>>& channels,
                        int sample_rate, WavSampleFormat format) {
  Require(!channels.empty(), ErrorCode::kInvalidArgument, "no channels to write");
  const std::size_t frames = channels.front().size();
  for (const auto& ch : channels) {
    Require(ch.size() == frames, ErrorCode::kShapeMismatch, "channel lengths differ");
  }
  const int bits = BitsOf(format);
  const auto n_channels = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t block_align = n_channels * static_cast<std::uint32_t>(bits / 8);
  const auto data_bytes = static_cast<std::uint32_t>(frames * block_align);

  std::string out;
  out.reserve(44 + data_bytes);
  out.append("RIFF");
  PutU32(out, 36 + data_bytes);
  out.append("WAVEfmt ");
  PutU32(out, 16);
  PutU16(out, format == WavSampleFormat::kFloat32 ? kFormatFloat : kFormatPcm);
  PutU16(out, n_channels);
  PutU32(out, static_cast<std::uint32_t>(sample_rate));
  PutU32(out, static_cast<std::uint32_t>(sample_rate) * block_align);
  PutU16(out, static_cast<std::uint16_t>(block_align));
  PutU16(out, static_cast<std::uint16_t>(bits));
  out.append("data");
  PutU32(out, data_bytes);
  for (std::size_t i = 0; i < frames; ++i) {
    for (const auto& ch : channels) EncodeSample(out, ch[i], format);
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) Fail(ErrorCode::kIoError, "cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) Fail(ErrorCode::kIoError, "write failed for " + path.string());
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip,
               WavSampleFormat format) {
  write_wav_channels(path, {clip.samples}, clip.sample_rate, format);
}

AudioClip resample(const AudioClip& clip, int target_rate) {
  Require(target_rate > 0, ErrorCode::kInvalidArgument, "target rate must be positive");
  Require(clip.sample_rate > 0, ErrorCode::kInvalidArgument, "source rate must be positive");
  if (target_rate == clip.sample_rate) return clip;

  constexpr double kZeroCrossings = 32.0;
  constexpr double kBeta = 9.0;
  const double ratio = static_cast<double>(target_rate) / clip.sample_rate;
  const double scale = 0.95 * std::min(1.0, ratio);
  const double half_width = kZeroCrossings / scale;
  const double i0_beta = BesselI0(kBeta);

  auto kernel = [&](double x) {
    const double u = x / half_width;
    if (std::abs(u) >= 1.0) return 0.0;
    const double arg = std::numbers::pi * scale * x;
    const double sinc = x == 0.0 ? 1.0 : std::sin(arg) / arg;
    return scale * sinc * BesselI0(kBeta * std::sqrt(1.0 - u * u)) / i0_beta;
  };

  const auto n_in = static_cast<std::int64_t>(clip.samples.size());
  const auto n_out = static_cast<std::int64_t>(
      std::llround(static_cast<double>(n_in) * target_rate / clip.sample_rate));
  const std::int64_t g = std::gcd(static_cast<std::int64_t>(clip.sample_rate),
                                  static_cast<std::int64_t>(target_rate));
  const std::int64_t up = target_rate / g;    // output step in phase units
  const std::int64_t down = clip.sample_rate / g;
  const auto taps = static_cast<std::int64_t>(std::ceil(half_width));

  // Output j sits at input position j * down / up = base + phase / up.
  // Kernel weights depend only on the phase, so they are tabulated when the
  // number of phases is modest.
  const bool tabulate = up <= 4096;
  std::vector<double> table;
  const std::int64_t width = 2 * taps + 2;
  if (tabulate) {
    table.resize(static_cast<std::size_t>(up * width));
    for (std::int64_t phase = 0; phase < up; ++phase) {
      const double frac = static_cast<double>(phase) / up;
      for (std::int64_t k = 0; k < width; ++k) {
        const double offset = static_cast<double>(k - taps) - frac;
        table[static_cast<std::size_t>(phase * width + k)] = kernel(offset);
      }
    }
  }

  AudioClip out;
  out.sample_rate = target_rate;
  out.source_id = clip.source_id;
  out.samples.assign(static_cast<std::size_t>(n_out), 0.0);
  for (std::int64_t j = 0; j < n_out; ++j) {
    const std::int64_t num = j * down;
    const std::int64_t base = num / up;
    const std::int64_t phase = num % up;
    const double frac = static_cast<double>(phase) / up;
    double acc = 0.0;
    for (std::int64_t k = 0; k < width; ++k) {
      const std::int64_t idx = base + k - taps;
      if (idx < 0 || idx >= n_in) continue;
      const double w = tabulate ? table[static_cast<std::size_t>(phase * width + k)]
                                : kernel(static_cast<double>(k - taps) - frac);
      acc += w * clip.samples[static_cast<std::size_t>(idx)];
    }
    out.samples[static_cast<std::size_t>(j)] = std::clamp(acc, -1.0, 1.0);
  }
  return out;
}

AudioClip highpass(const AudioClip& clip, double cutoff_hz) {
  Require(cutoff_hz > 0.0 && cutoff_hz < clip.sample_rate / 2.0,
          ErrorCode::kInvalidArgument, "high-pass cutoff must lie in (0, rate/2)");
  const auto sections = DesignButterworthHighpass(cutoff_hz, clip.sample_rate);
  const std::size_t n = clip.samples.size();
  AudioClip out = clip;
  if (n == 0) return out;

  // Odd extension, as in the usual forward-backward filtering recipe.
  const std::size_t pad = std::min<std::size_t>(n - 1, 15);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  const double first = clip.samples.front();
  const double last = clip.samples.back();
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * first - clip.samples[i]);
  ext.insert(ext.end(), clip.samples.begin(), clip.samples.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * last - clip.samples[n - 1 - i]);

  FilterCascade(sections, ext);
  std::reverse(ext.begin(), ext.end());
  FilterCascade(sections, ext);
  std::reverse(ext.begin(), ext.end());

  std::copy(ext.begin() + static_cast<std::ptrdiff_t>(pad),
            ext.begin() + static_cast<std::ptrdiff_t>(pad + n), out.samples.begin());
  return out;
}

double rms(const std::vector<double>& samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double v : samples) acc += v * v;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

}  // namespace birdcolor
