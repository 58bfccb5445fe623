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

#include "geosearch/synthetic_data.h"

#include <algorithm>
#include <array>
#include <cstdio>

#include "geosearch/error.h"

namespace geosearch {

namespace {

struct Rgb {
  std::uint8_t r, g, b;
};

// Label, fill color.
const std::vector<std::pair<std::string, Rgb>>& palette() {
  static const std::vector<std::pair<std::string, Rgb>> kPalette = {
      {"airplane", {230, 230, 235}},     {"ship", {220, 60, 50}},
      {"storage tank", {245, 200, 40}},  {"vehicle", {40, 90, 220}},
      {"windmill", {250, 140, 200}},     {"chimney", {120, 40, 140}},
      {"bridge", {150, 110, 60}},        {"tennis court", {30, 170, 90}},
      {"baseball field", {200, 120, 40}}, {"basketball court", {255, 110, 0}},
      {"stadium", {90, 200, 210}},       {"dam", {70, 70, 70}},
      {"harbor", {20, 40, 120}},         {"overpass", {180, 180, 90}},
      {"train station", {140, 20, 30}},  {"golf field", {150, 220, 120}},
  };
  return kPalette;
}

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

PixelRect random_box(std::mt19937_64& rng, const ImageExtent& extent, int min_side,
                     int max_side) {
  const int w = uniform(rng, min_side, max_side);
  const int h = uniform(rng, min_side, max_side);
  const int x = uniform(rng, 0, extent.width - w);
  const int y = uniform(rng, 0, extent.height - h);
  return {x, y, x + w, y + h};
}

// Boxes keep a gap of `margin` px so no entity hides another.
bool clear_of(const PixelRect& box, const std::vector<SceneEntity>& placed, int margin) {
  const PixelRect grown{box.x1 - margin, box.y1 - margin, box.x2 + margin, box.y2 + margin};
  return std::none_of(placed.begin(), placed.end(), [&](const SceneEntity& e) {
    return intersection_area(grown, e.box) > 0;
  });
}

constexpr int kMaxPlacementTries = 2000;
constexpr int kMargin = 8;

// Adds largest/smallest tags within every label group of two or more.
void tag_extremes(std::vector<SceneEntity>& entities) {
  for (std::size_t i = 0; i < entities.size(); ++i) {
    bool largest = true;
    bool smallest = true;
    int peers = 0;
    for (std::size_t k = 0; k < entities.size(); ++k) {
      if (k == i || entities[k].label != entities[i].label) continue;
      ++peers;
      if (entities[k].box.area() >= entities[i].box.area()) largest = false;
      if (entities[k].box.area() <= entities[i].box.area()) smallest = false;
    }
    if (peers == 0) continue;
    if (largest) entities[i].tags.push_back("largest");
    if (smallest) entities[i].tags.push_back("smallest");
  }
}

}  // namespace

void SceneSpec::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::kConfig, m); };
  if (!extent.valid() || extent.width < 64 || extent.height < 64) fail("extent must be >= 64x64");
  if (target_min_side < 2 || target_max_side < target_min_side) fail("bad target size range");
  if (target_max_side * 4 > std::min(extent.width, extent.height)) {
    fail("targets must be under a quarter of the image side");
  }
  if (min_distractors < 1 || max_distractors < min_distractors) fail("bad distractor range");
  if (min_entities < 2 + max_distractors || max_entities < min_entities) {
    fail("entity range must leave room for target, reference and distractors");
  }
  if (max_entities > static_cast<int>(palette().size()) + max_distractors + 1) {
    fail("too many entities for the label vocabulary");
  }
}

const std::vector<std::string>& synthetic_labels() {
  static const std::vector<std::string> kLabels = [] {
    std::vector<std::string> out;
    for (const auto& [label, rgb] : palette()) out.push_back(label);
    return out;
  }();
  return kLabels;
}

SyntheticScene make_scene(const SceneSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  const auto& labels = synthetic_labels();
  const int nlabels = static_cast<int>(labels.size());

  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<int> order(static_cast<std::size_t>(nlabels));
    for (int i = 0; i < nlabels; ++i) order[static_cast<std::size_t>(i)] = i;
    for (int i = nlabels - 1; i > 0; --i) std::swap(order[i], order[uniform(rng, 0, i)]);
    const std::string& target_label = labels[order[0]];
    const std::string& ref_label = labels[order[1]];

    std::vector<SceneEntity> ents;
    const PixelRect tbox =
        random_box(rng, spec.extent, spec.target_min_side, spec.target_max_side);
    ents.push_back({target_label, tbox, {}, true});

    // Reference within a few target sizes so the relation reads naturally.
    const int reach = 6 * spec.target_max_side;
    bool placed = false;
    for (int t = 0; t < kMaxPlacementTries && !placed; ++t) {
      const int w = uniform(rng, spec.target_min_side, 2 * spec.target_max_side);
      const int h = uniform(rng, spec.target_min_side, 2 * spec.target_max_side);
      const int x = uniform(rng, std::max(0, tbox.x1 - reach),
                            std::min(spec.extent.width - w, tbox.x2 + reach));
      const int y = uniform(rng, std::max(0, tbox.y1 - reach),
                            std::min(spec.extent.height - h, tbox.y2 + reach));
      const PixelRect box{x, y, x + w, y + h};
      if (clear_of(box, ents, kMargin)) {
        ents.push_back({ref_label, box, {}, false});
        placed = true;
      }
    }
    if (!placed) continue;
    const std::string predicate = spatial_predicate(tbox, ents[1].box);

    // Same-label distractors on a different side of the reference.
    const int distractors = uniform(rng, spec.min_distractors, spec.max_distractors);
    int added = 0;
    for (int t = 0; t < kMaxPlacementTries && added < distractors; ++t) {
      const PixelRect box =
          random_box(rng, spec.extent, spec.target_min_side, spec.target_max_side);
      if (spatial_predicate(box, ents[1].box) == predicate) continue;
      if (!clear_of(box, ents, kMargin)) continue;
      ents.push_back({target_label, box, {}, false});
      ++added;
    }
    if (added < distractors) continue;

    // Fillers with labels unused so far.
    const int total = uniform(rng, std::max(spec.min_entities, 2 + distractors),
                              spec.max_entities);
    int next_label = 2;
    for (int t = 0; t < kMaxPlacementTries && static_cast<int>(ents.size()) < total &&
                    next_label < nlabels;
         ++t) {
      const PixelRect box =
          random_box(rng, spec.extent, spec.target_min_side, 2 * spec.target_max_side);
      if (!clear_of(box, ents, kMargin)) continue;
      ents.push_back({labels[order[next_label++]], box, {}, false});
    }

    tag_extremes(ents);
    SyntheticScene scene;
    scene.extent = spec.extent;
    scene.entities = std::move(ents);
    scene.relations = compute_relation_facts(scene.entities);
    const std::string relation = predicate + " the " + ref_label;
    scene.query = "the " + target_label + " " + relation;
    scene.structured = GeoContext{target_label, std::nullopt, {relation}};
    scene.validate();
    return scene;
  }
  throw Error(ErrorKind::kSamplingExhausted, "could not place a synthetic scene");
}

Raster render_scene(const SyntheticScene& scene, const std::string& source) {
  const int w = scene.extent.width;
  const int h = scene.extent.height;
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
  // 16 px tiles of muted ground colors; flat tiles keep PNGs small.
  auto tile_shade = [](int tx, int ty) {
    std::uint64_t z = (static_cast<std::uint64_t>(tx) << 32) ^ static_cast<std::uint32_t>(ty);
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<int>(z % 17) - 8;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int s = tile_shade(x / 16, y / 16);
      std::uint8_t* p = &px[(static_cast<std::size_t>(y) * w + x) * 3];
      p[0] = static_cast<std::uint8_t>(96 + s);
      p[1] = static_cast<std::uint8_t>(104 + s);
      p[2] = static_cast<std::uint8_t>(84 + s);
    }
  }
  const auto& pal = palette();
  for (const auto& e : scene.entities) {
    Rgb fill{200, 200, 200};
    for (const auto& [label, rgb] : pal) {
      if (label == e.label) fill = rgb;
    }
    for (int y = e.box.y1; y < e.box.y2; ++y) {
      for (int x = e.box.x1; x < e.box.x2; ++x) {
        const bool edge = x == e.box.x1 || y == e.box.y1 || x == e.box.x2 - 1 || y == e.box.y2 - 1;
        std::uint8_t* p = &px[(static_cast<std::size_t>(y) * w + x) * 3];
        p[0] = edge ? fill.r / 2 : fill.r;
        p[1] = edge ? fill.g / 2 : fill.g;
        p[2] = edge ? fill.b / 2 : fill.b;
      }
    }
  }
  return Raster(scene.extent, std::move(px), source);
}

GeneratedSet generate_synthetic_manifest(int n, const SceneSpec& spec, std::uint64_t seed,
                                         const std::filesystem::path& out_dir) {
  if (n < 0) throw Error(ErrorKind::kConfig, "scene count must be >= 0");
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + out_dir.string() + ": " + ec.message());

  GeneratedSet out;
  out.manifest_path = out_dir / "manifest.jsonl";
  for (int i = 0; i < n; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    const SyntheticScene scene = make_scene(spec, rng);
    char stem[32];
    std::snprintf(stem, sizeof stem, "scene_%04d", i);
    const std::string image_name = std::string(stem) + ".png";
    save_png(render_scene(scene, image_name), out_dir / image_name);
    save_scene(scene, scene_path_for(out_dir / image_name));
    out.records.push_back({image_name, scene.query, scene.structured, scene.target().box});
  }
  save_manifest(out.records, out.manifest_path);
  return out;
}

}  // namespace geosearch
