/* Copyright 2026 The geosearch Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geosearch {

enum class ErrorKind {
  kInvalidArgument,
  kRegionTooSmall,
  kEmptyClip,
  kOutOfBounds,
  kIo,
  kDecode,
  kParseFailure,
  kOracleUnavailable,
  kMalformedResponse,
  kFixtureMiss,
  kNoUntriedActions,
  kEmptyInput,
  kManifest,
  kSamplingExhausted,
  kConfig,
};

std::string_view to_string(ErrorKind kind);

// Broad grouping used by the CLI to pick an exit code.
enum class ErrorCategory { kConfig, kIo, kOracle, kInternal };

ErrorCategory category_of(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace geosearch
