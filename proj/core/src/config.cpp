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

#include "birdcolor/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "birdcolor/error.hpp"

namespace birdcolor {
namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void BadValue(const std::string& key, const std::string& value, const char* kind) {
  Fail(ErrorCode::kParseError, "config key '" + key + "': '" + value + "' is not " + kind);
}

}  // namespace

KeyValueConfig KeyValueConfig::Parse(const std::string& text) {
  KeyValueConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      Fail(ErrorCode::kParseError, "config line " + std::to_string(line_no) + " has no '='");
    }
    const std::string key = Trim(line.substr(0, eq));
    if (key.empty()) {
      Fail(ErrorCode::kParseError, "config line " + std::to_string(line_no) + " has no key");
    }
    config.values_[key] = Trim(line.substr(eq + 1));
  }
  return config;
}

KeyValueConfig KeyValueConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIoError, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

std::optional<std::string> KeyValueConfig::Get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::GetString(const std::string& key, const std::string& fallback) const {
  return Get(key).value_or(fallback);
}

double KeyValueConfig::GetDouble(const std::string& key, double fallback) const {
  const auto v = Get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const double d = std::stod(*v, &used);
    if (used != v->size()) BadValue(key, *v, "a number");
    return d;
  } catch (const std::logic_error&) {
    BadValue(key, *v, "a number");
  }
}

std::int64_t KeyValueConfig::GetInt(const std::string& key, std::int64_t fallback) const {
  const auto v = Get(key);
  if (!v) return fallback;
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) BadValue(key, *v, "an integer");
  return out;
}

std::uint64_t KeyValueConfig::GetUnsigned(const std::string& key, std::uint64_t fallback) const {
  const auto v = Get(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    BadValue(key, *v, "a non-negative integer");
  }
  return out;
}

bool KeyValueConfig::GetBool(const std::string& key, bool fallback) const {
  const auto v = Get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  BadValue(key, *v, "a boolean");
}

}  // namespace birdcolor
