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

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "geosearch/geometry.h"
#include "geosearch/manifest.h"
#include "geosearch/raster.h"
#include "geosearch/scene.h"

namespace geosearch {

struct SceneSpec {
  ImageExtent extent{1024, 1024};
  int target_min_side = 16;
  int target_max_side = 32;
  // Total entities per scene, target included. At least 3: the target, the
  // reference it is related to, and one same-label distractor.
  int min_entities = 5;
  int max_entities = 9;
  // Same-label distractors per scene.
  int min_distractors = 1;
  int max_distractors = 2;

  void validate() const;
};

// Labels used for synthetic entities, each drawn in a distinct color.
const std::vector<std::string>& synthetic_labels();

// Builds one scene: a target whose query relation ("the ship left of the
// bridge") is true for it and false for every same-label distractor.
SyntheticScene make_scene(const SceneSpec& spec, std::mt19937_64& rng);

// Labeled rectangles over a blocky textured background.
Raster render_scene(const SyntheticScene& scene, const std::string& source = "synthetic");

struct GeneratedSet {
  std::filesystem::path manifest_path;
  std::vector<ManifestRecord> records;
};

// Writes scene_NNNN.png, scene_NNNN.scene.json and manifest.jsonl under
// `out_dir`. Output is a pure function of (n, spec, seed).
GeneratedSet generate_synthetic_manifest(int n, const SceneSpec& spec, std::uint64_t seed,
                                         const std::filesystem::path& out_dir);

}  // namespace geosearch
