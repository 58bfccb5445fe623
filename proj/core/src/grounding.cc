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

#include "geosearch/grounding.h"

#include <chrono>

#include "geosearch/error.h"

namespace geosearch {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

std::string_view to_string(GroundingMode mode) {
  switch (mode) {
    case GroundingMode::kPlain: return "plain";
    case GroundingMode::kSearch: return "search";
    case GroundingMode::kOracleRegion: return "oracle-region";
  }
  return "unknown";
}

GroundingMode grounding_mode_from_string(std::string_view name) {
  if (name == "plain") return GroundingMode::kPlain;
  if (name == "search") return GroundingMode::kSearch;
  if (name == "oracle-region") return GroundingMode::kOracleRegion;
  throw Error(ErrorKind::kConfig, "unknown mode '" + std::string(name) +
                                      "' (expected plain, search or oracle-region)");
}

PixelRect ground(const Raster& global, const RawQuery& query, const PixelRect& cue,
                 Oracle& oracle) {
  if (!cue.valid() || !global.extent().contains(cue)) {
    throw Error(ErrorKind::kOutOfBounds, "cue " + to_string(cue) + " is outside the image");
  }
  const PixelRect box = oracle.conditional_ground(RegionView{global, cue}, query);
  return clip(box, global.extent());
}

PipelineResult run_pipeline(const PipelineInput& input, const SearchConfig& config,
                            Oracle& oracle, GroundingMode mode) {
  const auto t0 = Clock::now();
  CachingOracle counted(oracle);
  PipelineResult result;
  const ImageExtent extent = input.image.extent();

  PixelRect cue = extent.rect();
  if (mode == GroundingMode::kSearch) {
    const auto ts = Clock::now();
    const GeoContext ctx = structure_query(input.query, input.structured, counted);
    result.timing.structure_ms = ms_since(ts);
    const auto tq = Clock::now();
    SearchResult sr = run_search(input.image, input.query, ctx, config, counted);
    result.timing.search_ms = ms_since(tq);
    cue = sr.tree.node(sr.best).region;
    result.trace = std::move(sr.trace);
  } else if (mode == GroundingMode::kOracleRegion) {
    if (!input.gt_box) {
      throw Error(ErrorKind::kConfig, "oracle-region mode needs a ground-truth box");
    }
    cue = scale_about_center(*input.gt_box, kOracleRegionDilation, extent);
  }
  result.best_region = cue;

  const auto tg = Clock::now();
  result.predicted = ground(input.image, input.query, cue, counted);
  result.timing.ground_ms = ms_since(tg);
  result.timing.total_ms = ms_since(t0);
  result.oracle_calls = counted.inner_calls();
  return result;
}

}  // namespace geosearch
