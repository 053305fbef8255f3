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

#ifndef BIRDCOLOR_FFT_HPP_
#define BIRDCOLOR_FFT_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace birdcolor {

// Owns a pair of FFTW plans for a fixed real transform size.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  // input.size() == size(), spectrum.size() == bins().
  void Forward(std::span<const double> input, std::span<std::complex<double>> spectrum);
  // Unnormalised inverse: Inverse(Forward(x)) == size() * x.
  void Inverse(std::span<const std::complex<double>> spectrum, std::span<double> output);

 private:
  void Release();

  std::size_t size_ = 0;
  double* real_ = nullptr;
  void* complex_ = nullptr;
  void* forward_ = nullptr;
  void* inverse_ = nullptr;
};

// Periodic Hann window of the given length.
std::vector<double> HannWindow(std::size_t length);

}  // namespace birdcolor

#endif  // BIRDCOLOR_FFT_HPP_
