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

#ifndef BIRDCOLOR_NPY_HPP_
#define BIRDCOLOR_NPY_HPP_

#include <cstddef>
#include <filesystem>
#include <vector>

#include "birdcolor/matrix.hpp"

namespace birdcolor {

// Little-endian float64, C-order array in NPY format version 1.0.
struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<double> data;
};

void write_npy(const std::filesystem::path& path, const NpyArray& array);
void write_npy(const std::filesystem::path& path, const Matrix& matrix);
// Accepts only '<f8' C-order files, which is what write_npy produces.
NpyArray read_npy(const std::filesystem::path& path);
Matrix read_npy_matrix(const std::filesystem::path& path);

}  // namespace birdcolor

#endif  // BIRDCOLOR_NPY_HPP_
