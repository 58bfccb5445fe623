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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geosearch/geometry.h"
#include "geosearch/query.h"
#include "geosearch/raster.h"
#include "geosearch/scene.h"
#include "geosearch/synthetic_oracle.h"

namespace geosearch::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "geosearch");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Solid gray raster tagged with `source`.
Raster blank_raster(ImageExtent extent, const std::string& source, std::uint8_t value = 90);

// Scene with the given entities; relation facts are derived from geometry.
SyntheticScene scene_of(ImageExtent extent, std::vector<SceneEntity> entities,
                        std::string query = "the target");

// A synthetic oracle with `scene` registered under `source`.
struct SyntheticWorld {
  std::shared_ptr<SceneRegistry> registry = std::make_shared<SceneRegistry>();
  std::unique_ptr<SyntheticOracle> oracle;
  Raster image;

  SyntheticWorld(const SyntheticScene& scene, NoiseConfig noise = {},
                 const std::string& source = "world");
};

// ---- independent reward model ------------------------------------------------
// Re-derives the noise-free synthetic reward from the scene description alone,
// without the engine's geometry or reward code.

struct ReferenceReward {
  double r_qa = 0.0;
  double r_iou = 0.0;
  double r_total = 0.0;
};

ReferenceReward reference_reward(const SyntheticScene& scene, const GeoContext& ctx,
                                 const PixelRect& region, double alpha);

// All regions reachable by zoom-in only from the full image within `depth`
// levels, root first (1 + 9 + 81 for depth 2).
std::vector<PixelRect> enumerate_zoom_in_regions(ImageExtent extent, int depth);

}  // namespace geosearch::testing
