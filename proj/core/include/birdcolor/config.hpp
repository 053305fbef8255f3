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

#ifndef BIRDCOLOR_CONFIG_HPP_
#define BIRDCOLOR_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace birdcolor {

// Flat `key = value` configuration. Blank lines and text after '#' are
// ignored. Later duplicates override earlier ones.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig Parse(const std::string& text);
  static KeyValueConfig Load(const std::filesystem::path& path);

  bool Has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> Get(const std::string& key) const;
  void Set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  std::int64_t GetInt(const std::string& key, std::int64_t fallback) const;
  std::uint64_t GetUnsigned(const std::string& key, std::uint64_t fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace birdcolor

#endif  // BIRDCOLOR_CONFIG_HPP_
