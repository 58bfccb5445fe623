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

#include "geosearch/error.h"

namespace geosearch {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kRegionTooSmall: return "RegionTooSmall";
    case ErrorKind::kEmptyClip: return "EmptyClip";
    case ErrorKind::kOutOfBounds: return "OutOfBounds";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kDecode: return "DecodeError";
    case ErrorKind::kParseFailure: return "ParseFailure";
    case ErrorKind::kOracleUnavailable: return "OracleUnavailable";
    case ErrorKind::kMalformedResponse: return "MalformedResponse";
    case ErrorKind::kFixtureMiss: return "FixtureMiss";
    case ErrorKind::kNoUntriedActions: return "NoUntriedActions";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kManifest: return "ManifestError";
    case ErrorKind::kSamplingExhausted: return "SamplingExhausted";
    case ErrorKind::kConfig: return "ConfigError";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kManifest:
      return ErrorCategory::kConfig;
    case ErrorKind::kIo:
    case ErrorKind::kDecode:
      return ErrorCategory::kIo;
    case ErrorKind::kParseFailure:
    case ErrorKind::kOracleUnavailable:
    case ErrorKind::kMalformedResponse:
    case ErrorKind::kFixtureMiss:
      return ErrorCategory::kOracle;
    default:
      return ErrorCategory::kInternal;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

}  // namespace geosearch
