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

#include "birdcolor/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "birdcolor/error.hpp"
#include "birdcolor/rng.hpp"

namespace birdcolor {

void DatasetManifest::Validate() const {
  Require(k_folds >= 2, ErrorCode::kInvalidArgument, "need at least 2 folds");
  for (const auto& e : entries) {
    Require(e.fold < k_folds, ErrorCode::kInvalidArgument, "fold index out of range");
    Require(e.label < label_set.size(), ErrorCode::kInvalidArgument, "label out of range");
  }
}

std::vector<std::vector<std::size_t>> StratifiedFolds(const std::vector<std::size_t>& counts,
                                                      std::size_t k_folds, std::uint64_t seed) {
  Require(k_folds >= 2, ErrorCode::kInvalidArgument, "need at least 2 folds");
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(counts.size());
  std::size_t next = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    std::vector<std::size_t> order(counts[c]);
    std::iota(order.begin(), order.end(), 0);
    rng.Shuffle(std::span<std::size_t>(order));
    folds[c].assign(counts[c], 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
      folds[c][order[i]] = next;
      next = (next + 1) % k_folds;
    }
  }
  return folds;
}

DatasetManifest build_manifest(const std::filesystem::path& root, std::size_t k_folds,
                               std::uint64_t seed) {
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec)) {
    Fail(ErrorCode::kIoError, "dataset root " + root.string() + " is not a directory");
  }
  DatasetManifest manifest;
  manifest.root = root.string();
  manifest.k_folds = k_folds;
  manifest.seed = seed;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_directory()) manifest.label_set.push_back(entry.path().filename().string());
  }
  std::sort(manifest.label_set.begin(), manifest.label_set.end());
  Require(!manifest.label_set.empty(), ErrorCode::kEmptyDataset,
          "no class directories under " + root.string());

  std::vector<std::vector<std::string>> files(manifest.label_set.size());
  std::vector<std::size_t> counts;
  for (std::size_t c = 0; c < manifest.label_set.size(); ++c) {
    for (const auto& f : std::filesystem::directory_iterator(root / manifest.label_set[c])) {
      if (f.is_regular_file() && f.path().extension() == ".wav") {
        files[c].push_back(std::filesystem::relative(f.path(), root).generic_string());
      }
    }
    std::sort(files[c].begin(), files[c].end());
    Require(!files[c].empty(), ErrorCode::kEmptyDataset,
            "class directory '" + manifest.label_set[c] + "' has no WAV files");
    counts.push_back(files[c].size());
  }
  const auto folds = StratifiedFolds(counts, k_folds, seed);
  for (std::size_t c = 0; c < files.size(); ++c) {
    for (std::size_t i = 0; i < files[c].size(); ++i) {
      manifest.entries.push_back({files[c][i], c, folds[c][i]});
    }
  }
  return manifest;
}

nlohmann::json manifest_to_json(const DatasetManifest& manifest) {
  nlohmann::json doc;
  doc["format"] = "birdcolor-manifest";
  doc["version"] = 1;
  doc["root"] = manifest.root;
  doc["k_folds"] = manifest.k_folds;
  doc["seed"] = manifest.seed;
  doc["label_set"] = manifest.label_set;
  auto entries = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"path", e.path}, {"label", manifest.label_set[e.label]}, {"fold", e.fold}});
  }
  doc["entries"] = std::move(entries);
  return doc;
}

DatasetManifest manifest_from_json(const nlohmann::json& doc) {
  try {
    DatasetManifest m;
    m.root = doc.at("root").get<std::string>();
    m.k_folds = doc.at("k_folds").get<std::size_t>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.label_set = doc.at("label_set").get<std::vector<std::string>>();
    for (const auto& e : doc.at("entries")) {
      const auto label = e.at("label").get<std::string>();
      const auto it = std::find(m.label_set.begin(), m.label_set.end(), label);
      Require(it != m.label_set.end(), ErrorCode::kParseError,
              "entry label '" + label + "' is not in label_set");
      m.entries.push_back({e.at("path").get<std::string>(),
                           static_cast<std::size_t>(it - m.label_set.begin()),
                           e.at("fold").get<std::size_t>()});
    }
    m.Validate();
    return m;
  } catch (const nlohmann::json::exception& ex) {
    Fail(ErrorCode::kParseError, std::string("malformed manifest: ") + ex.what());
  }
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path.string());
  out << manifest_to_json(manifest).dump(2) << "\n";
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIoError, "cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& ex) {
    Fail(ErrorCode::kParseError, "manifest " + path.string() + " is not JSON: " + ex.what());
  }
  return manifest_from_json(doc);
}

}  // namespace birdcolor
