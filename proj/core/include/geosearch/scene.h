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
#include <optional>
#include <string>
#include <vector>

#include "geosearch/geometry.h"
#include "geosearch/query.h"
#include "json.hpp"

namespace geosearch {

struct SceneEntity {
  std::string label;
  PixelRect box;
  std::vector<std::string> tags;  // attribute words, e.g. "largest"
  bool target = false;

  friend bool operator==(const SceneEntity&, const SceneEntity&) = default;
};

// subject <predicate> object, e.g. ship "left of" storage tank. Indices point
// into SyntheticScene::entities; labels are kept for readability.
struct RelationFact {
  int subject = 0;
  std::string predicate;
  int object = 0;
  std::string subject_label;
  std::string object_label;

  friend bool operator==(const RelationFact&, const RelationFact&) = default;
};

// World model behind the synthetic oracle: labeled boxes and the spatial
// facts between them. Exactly one entity is the query target.
struct SyntheticScene {
  ImageExtent extent;
  std::vector<SceneEntity> entities;
  std::vector<RelationFact> relations;
  std::string query;
  std::optional<GeoContext> structured;

  int target_index() const;
  const SceneEntity& target() const { return entities.at(target_index()); }

  // Throws InvalidArgument when a box leaves the extent, a fact index is out
  // of range, or the scene does not flag exactly one target.
  void validate() const;

  friend bool operator==(const SyntheticScene&, const SyntheticScene&) = default;
};

void to_json(nlohmann::json& j, const SyntheticScene& s);
void from_json(const nlohmann::json& j, SyntheticScene& s);

SyntheticScene load_scene(const std::filesystem::path& path);
void save_scene(const SyntheticScene& scene, const std::filesystem::path& path);

// "<stem>.scene.json" next to the image.
std::filesystem::path scene_path_for(const std::filesystem::path& image_path);

// Dominant-axis direction of `subject` relative to `reference`: "left of",
// "right of", "above" or "below".
std::string spatial_predicate(const PixelRect& subject, const PixelRect& reference);

// Gap between the boxes is at most twice the subject's longer side.
bool is_near(const PixelRect& subject, const PixelRect& reference);

// Directional (and "near") facts for every ordered pair of entities with
// different labels.
std::vector<RelationFact> compute_relation_facts(
    const std::vector<SceneEntity>& entities);

}  // namespace geosearch
