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

#include "birdcolor/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <utility>

#include "birdcolor/error.hpp"

namespace birdcolor {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

RealFft::RealFft(std::size_t size) : size_(size) {
  Require(size >= 2, ErrorCode::kInvalidArgument, "FFT size must be at least 2");
  std::lock_guard<std::mutex> lock(PlannerMutex());
  real_ = fftw_alloc_real(size);
  auto* spec = fftw_alloc_complex(size / 2 + 1);
  complex_ = spec;
  const int n = static_cast<int>(size);
  forward_ = fftw_plan_dft_r2c_1d(n, real_, spec, FFTW_ESTIMATE);
  inverse_ = fftw_plan_dft_c2r_1d(n, spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() { Release(); }

RealFft::RealFft(RealFft&& other) noexcept
    : size_(std::exchange(other.size_, 0)),
      real_(std::exchange(other.real_, nullptr)),
      complex_(std::exchange(other.complex_, nullptr)),
      forward_(std::exchange(other.forward_, nullptr)),
      inverse_(std::exchange(other.inverse_, nullptr)) {}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
  if (this != &other) {
    Release();
    size_ = std::exchange(other.size_, 0);
    real_ = std::exchange(other.real_, nullptr);
    complex_ = std::exchange(other.complex_, nullptr);
    forward_ = std::exchange(other.forward_, nullptr);
    inverse_ = std::exchange(other.inverse_, nullptr);
  }
  return *this;
}

void RealFft::Release() {
  if (real_ == nullptr) return;
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_));
  fftw_free(real_);
  fftw_free(complex_);
  real_ = nullptr;
  complex_ = nullptr;
}

void RealFft::Forward(std::span<const double> input,
                      std::span<std::complex<double>> spectrum) {
  std::copy(input.begin(), input.end(), real_);
  fftw_execute(static_cast<fftw_plan>(forward_));
  const auto* spec = static_cast<const fftw_complex*>(complex_);
  for (std::size_t k = 0; k < bins(); ++k) spectrum[k] = {spec[k][0], spec[k][1]};
}

void RealFft::Inverse(std::span<const std::complex<double>> spectrum,
                      std::span<double> output) {
  auto* spec = static_cast<fftw_complex*>(complex_);
  for (std::size_t k = 0; k < bins(); ++k) {
    spec[k][0] = spectrum[k].real();
    spec[k][1] = spectrum[k].imag();
  }
  fftw_execute(static_cast<fftw_plan>(inverse_));
  std::copy(real_, real_ + size_, output.begin());
}

std::vector<double> HannWindow(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t i = 0; i < length; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(length));
  }
  return w;
}

}  // namespace birdcolor
