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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geosearch/grounding.h"
#include "geosearch/remote_oracle.h"
#include "geosearch/search.h"
#include "geosearch/synthetic_oracle.h"
#include "json.hpp"

namespace geosearch::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitOracle = 3;
inline constexpr int kExitInternal = 4;

struct OracleSettings {
  std::string kind = "synthetic";  // synthetic | replay | remote
  NoiseConfig noise;
  std::vector<std::string> fixtures;
  std::optional<std::string> record;  // fixture file to append live responses to
  RemoteOracleConfig remote;
};

// Everything that determines a run's results. Output paths and the worker
// count are deliberately absent: they do not change results.
struct RunConfig {
  SearchConfig search;
  OracleSettings oracle;
  std::string mode = "search";
};

void to_json(nlohmann::json& j, const RunConfig& c);
// Overlays the keys present in `j` on `c`.
void from_json(const nlohmann::json& j, RunConfig& c);

// Runs the command line and returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geosearch::cli
