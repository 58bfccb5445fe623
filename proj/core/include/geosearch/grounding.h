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

#include <optional>
#include <string>

#include "geosearch/geometry.h"
#include "geosearch/oracle.h"
#include "geosearch/query.h"
#include "geosearch/raster.h"
#include "geosearch/search.h"

namespace geosearch {

enum class GroundingMode {
  kPlain,         // whole image as cue, no search
  kSearch,        // cue = best region found by run_search
  kOracleRegion,  // cue = GT box dilated 2x; evaluation-only upper bound
};

std::string_view to_string(GroundingMode mode);
GroundingMode grounding_mode_from_string(std::string_view name);

inline constexpr double kOracleRegionDilation = 2.0;

// Conditional grounding with `cue` as the regional prior. The result is in
// global pixel coordinates, clipped to the image.
PixelRect ground(const Raster& global, const RawQuery& query, const PixelRect& cue,
                 Oracle& oracle);

struct StageTiming {
  double structure_ms = 0.0;
  double search_ms = 0.0;
  double ground_ms = 0.0;
  double total_ms = 0.0;
};

struct PipelineResult {
  PixelRect predicted;
  PixelRect best_region;
  std::optional<SearchTrace> trace;  // search mode only
  StageTiming timing;
  int oracle_calls = 0;
};

struct PipelineInput {
  const Raster& image;
  RawQuery query;
  std::optional<GeoContext> structured;  // manifest-provided structure
  std::optional<PixelRect> gt_box;       // required by kOracleRegion
};

PipelineResult run_pipeline(const PipelineInput& input, const SearchConfig& config,
                            Oracle& oracle, GroundingMode mode);

}  // namespace geosearch
