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

#ifndef BIRDCOLOR_ERROR_HPP_
#define BIRDCOLOR_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace birdcolor {

// Every failure the library reports carries one of these codes so callers
// (and the CLI's machine-readable error line) can tell them apart.
enum class ErrorCode {
  kInvalidArgument,
  kIoError,
  kUnsupportedFormat,
  kEmptyAudio,
  kTooShort,
  kShapeMismatch,
  kNonFinite,
  kEmptyDataset,
  kParseError,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) Fail(code, message);
}

}  // namespace birdcolor

#endif  // BIRDCOLOR_ERROR_HPP_
