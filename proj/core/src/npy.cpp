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

#include "birdcolor/npy.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "birdcolor/error.hpp"

namespace birdcolor {

static_assert(std::endian::native == std::endian::little,
              "NPY I/O assumes a little-endian host");

void write_npy(const std::filesystem::path& path, const NpyArray& array) {
  std::size_t count = 1;
  std::string shape = "(";
  for (std::size_t i = 0; i < array.shape.size(); ++i) {
    count *= array.shape[i];
    shape += std::to_string(array.shape[i]);
    shape += (array.shape.size() == 1 || i + 1 < array.shape.size()) ? "," : "";
    if (i + 1 < array.shape.size()) shape += " ";
  }
  shape += ")";
  Require(count == array.data.size(), ErrorCode::kShapeMismatch, "NPY shape/data mismatch");

  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': " + shape + ", }";
  // Magic (6) + version (2) + length (2) + header, padded to 64 bytes.
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path.string());
  out.write("\x93NUMPY\x01\x00", 8);
  const auto len = static_cast<std::uint16_t>(header.size());
  const char len_bytes[2] = {static_cast<char>(len & 0xFF), static_cast<char>(len >> 8)};
  out.write(len_bytes, 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(array.data.data()),
            static_cast<std::streamsize>(array.data.size() * sizeof(double)));
  if (!out) Fail(ErrorCode::kIoError, "write failed for " + path.string());
}

void write_npy(const std::filesystem::path& path, const Matrix& matrix) {
  write_npy(path, NpyArray{{matrix.rows(), matrix.cols()},
                           {matrix.values().begin(), matrix.values().end()}});
}

NpyArray read_npy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot open " + path.string());
  char magic[10];
  in.read(magic, 10);
  if (!in || std::memcmp(magic, "\x93NUMPY", 6) != 0 || magic[6] != 1) {
    Fail(ErrorCode::kParseError, "not an NPY v1 file: " + path.string());
  }
  const std::size_t header_len = static_cast<unsigned char>(magic[8]) |
                                 (static_cast<std::size_t>(static_cast<unsigned char>(magic[9])) << 8);
  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  if (header.find("'<f8'") == std::string::npos ||
      header.find("'fortran_order': False") == std::string::npos) {
    Fail(ErrorCode::kUnsupportedFormat, "only little-endian float64 C-order NPY is supported");
  }
  const auto open = header.find('(', header.find("'shape'"));
  const auto close = header.find(')', open);
  if (open == std::string::npos || close == std::string::npos) {
    Fail(ErrorCode::kParseError, "NPY header lacks a shape");
  }
  NpyArray array;
  std::size_t count = 1;
  std::string dims = header.substr(open + 1, close - open - 1);
  std::size_t pos = 0;
  while (pos < dims.size()) {
    while (pos < dims.size() && (dims[pos] == ' ' || dims[pos] == ',')) ++pos;
    if (pos >= dims.size()) break;
    std::size_t used = 0;
    const auto v = std::stoull(dims.substr(pos), &used);
    array.shape.push_back(static_cast<std::size_t>(v));
    count *= static_cast<std::size_t>(v);
    pos += used;
  }
  array.data.resize(count);
  in.read(reinterpret_cast<char*>(array.data.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) Fail(ErrorCode::kParseError, "truncated NPY payload in " + path.string());
  return array;
}

Matrix read_npy_matrix(const std::filesystem::path& path) {
  const NpyArray a = read_npy(path);
  Require(a.shape.size() == 2, ErrorCode::kShapeMismatch, "expected a 2-D array");
  Matrix m(a.shape[0], a.shape[1]);
  std::copy(a.data.begin(), a.data.end(), m.values().begin());
  return m;
}

}  // namespace birdcolor
