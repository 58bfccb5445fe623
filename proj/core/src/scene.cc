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

#include "geosearch/scene.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "geosearch/error.h"

namespace geosearch {

int SyntheticScene::target_index() const {
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (entities[i].target) return static_cast<int>(i);
  }
  throw Error(ErrorKind::kInvalidArgument, "scene has no target entity");
}

void SyntheticScene::validate() const {
  if (!extent.valid()) {
    throw Error(ErrorKind::kInvalidArgument, "scene extent must be positive");
  }
  int targets = 0;
  for (const auto& e : entities) {
    if (!e.box.valid() || !extent.contains(e.box)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "entity '" + e.label + "' box " + to_string(e.box) +
                      " is outside the scene");
    }
    if (e.target) ++targets;
  }
  if (targets != 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "scene must flag exactly one target, found " +
                    std::to_string(targets));
  }
  const int n = static_cast<int>(entities.size());
  for (const auto& f : relations) {
    if (f.subject < 0 || f.subject >= n || f.object < 0 || f.object >= n) {
      throw Error(ErrorKind::kInvalidArgument, "relation fact index out of range");
    }
  }
}

void to_json(nlohmann::json& j, const SyntheticScene& s) {
  nlohmann::json entities = nlohmann::json::array();
  for (const auto& e : s.entities) {
    entities.push_back({{"label", e.label},
                        {"box", e.box},
                        {"tags", e.tags},
                        {"target", e.target}});
  }
  nlohmann::json facts = nlohmann::json::array();
  for (const auto& f : s.relations) {
    facts.push_back({{"subject", f.subject},
                     {"predicate", f.predicate},
                     {"object", f.object},
                     {"subject_label", f.subject_label},
                     {"object_label", f.object_label}});
  }
  j = nlohmann::json{
      {"extent", {{"width", s.extent.width}, {"height", s.extent.height}}},
      {"entities", entities},
      {"relations", facts},
      {"query", s.query},
      {"structured", s.structured ? nlohmann::json(*s.structured)
                                  : nlohmann::json(nullptr)}};
}

void from_json(const nlohmann::json& j, SyntheticScene& s) {
  try {
    s.extent = {j.at("extent").at("width").get<int>(),
                j.at("extent").at("height").get<int>()};
    s.entities.clear();
    for (const auto& e : j.at("entities")) {
      SceneEntity ent;
      ent.label = e.at("label").get<std::string>();
      ent.box = e.at("box").get<PixelRect>();
      if (e.contains("tags")) ent.tags = e["tags"].get<std::vector<std::string>>();
      ent.target = e.value("target", false);
      s.entities.push_back(std::move(ent));
    }
    s.relations.clear();
    if (j.contains("relations")) {
      for (const auto& f : j["relations"]) {
        RelationFact fact;
        fact.subject = f.at("subject").get<int>();
        fact.predicate = f.at("predicate").get<std::string>();
        fact.object = f.at("object").get<int>();
        fact.subject_label = f.value("subject_label", "");
        fact.object_label = f.value("object_label", "");
        s.relations.push_back(std::move(fact));
      }
    }
    s.query = j.value("query", "");
    s.structured.reset();
    if (j.contains("structured") && !j["structured"].is_null()) {
      s.structured = j["structured"].get<GeoContext>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidArgument, std::string("bad scene: ") + e.what());
  }
  s.validate();
}

SyntheticScene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open scene " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kDecode, path.string() + ": " + e.what());
  }
  return j.get<SyntheticScene>();
}

void save_scene(const SyntheticScene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << nlohmann::json(scene).dump(1) << "\n";
}

std::filesystem::path scene_path_for(const std::filesystem::path& image_path) {
  std::filesystem::path p = image_path;
  p.replace_extension(".scene.json");
  return p;
}

std::string spatial_predicate(const PixelRect& subject, const PixelRect& reference) {
  // Doubled centers keep the comparison exact.
  const long dx = static_cast<long>(reference.x1 + reference.x2) - (subject.x1 + subject.x2);
  const long dy = static_cast<long>(reference.y1 + reference.y2) - (subject.y1 + subject.y2);
  if (std::labs(dx) >= std::labs(dy)) return dx > 0 ? "left of" : "right of";
  return dy > 0 ? "above" : "below";
}

bool is_near(const PixelRect& subject, const PixelRect& reference) {
  const int gap_x = std::max({0, reference.x1 - subject.x2, subject.x1 - reference.x2});
  const int gap_y = std::max({0, reference.y1 - subject.y2, subject.y1 - reference.y2});
  return std::max(gap_x, gap_y) <= 2 * subject.max_side();
}

std::vector<RelationFact> compute_relation_facts(
    const std::vector<SceneEntity>& entities) {
  std::vector<RelationFact> facts;
  const int n = static_cast<int>(entities.size());
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (i == k || entities[i].label == entities[k].label) continue;
      const auto& s = entities[i];
      const auto& o = entities[k];
      facts.push_back({i, spatial_predicate(s.box, o.box), k, s.label, o.label});
      if (is_near(s.box, o.box)) {
        facts.push_back({i, "near", k, s.label, o.label});
      }
    }
  }
  return facts;
}

}  // namespace geosearch
