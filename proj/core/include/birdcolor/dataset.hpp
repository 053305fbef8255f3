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

#ifndef BIRDCOLOR_DATASET_HPP_
#define BIRDCOLOR_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace birdcolor {

struct ManifestEntry {
  std::string path;   // relative to DatasetManifest::root
  std::size_t label = 0;  // index into label_set
  std::size_t fold = 0;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::string root;
  std::vector<std::string> label_set;
  std::size_t k_folds = 5;
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const ManifestEntry& e) const {
    return std::filesystem::path(root) / e.path;
  }
  void Validate() const;
  bool operator==(const DatasetManifest&) const = default;
};

// Stratified K-fold assignment over root/<label>/*.wav. Labels and files are
// taken in sorted order, each class is shuffled with the seed and dealt
// round-robin into folds starting where the previous class stopped, so
// per-class and overall fold sizes differ by at most one. Throws
// kEmptyDataset for a class directory without WAV files.
DatasetManifest build_manifest(const std::filesystem::path& root, std::size_t k_folds,
                               std::uint64_t seed);

// Same assignment for labels already known: counts[c] items of class c,
// returns the fold of each item in class-major order.
std::vector<std::vector<std::size_t>> StratifiedFolds(const std::vector<std::size_t>& counts,
                                                      std::size_t k_folds, std::uint64_t seed);

nlohmann::json manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& doc);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace birdcolor

#endif  // BIRDCOLOR_DATASET_HPP_
