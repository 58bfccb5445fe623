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

#include "test_support.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>

namespace geosearch::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() /
          (tag + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Raster blank_raster(ImageExtent extent, const std::string& source, std::uint8_t value) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(extent.width) * extent.height * 3, value);
  return Raster(extent, std::move(px), source);
}

SyntheticScene scene_of(ImageExtent extent, std::vector<SceneEntity> entities,
                        std::string query) {
  SyntheticScene s;
  s.extent = extent;
  s.entities = std::move(entities);
  s.relations = compute_relation_facts(s.entities);
  s.query = std::move(query);
  return s;
}

SyntheticWorld::SyntheticWorld(const SyntheticScene& scene, NoiseConfig noise,
                               const std::string& source)
    : image(blank_raster(scene.extent, source)) {
  registry->add(source, scene);
  oracle = std::make_unique<SyntheticOracle>(registry, noise);
}

namespace {

struct Box {
  long long x1, y1, x2, y2;
  long long area() const { return std::max(0LL, x2 - x1) * std::max(0LL, y2 - y1); }
};

Box box_of(const PixelRect& r) { return {r.x1, r.y1, r.x2, r.y2}; }

Box overlap(const Box& a, const Box& b) {
  Box o{std::max(a.x1, b.x1), std::max(a.y1, b.y1), std::min(a.x2, b.x2), std::min(a.y2, b.y2)};
  if (o.x2 <= o.x1 || o.y2 <= o.y1) return {0, 0, 0, 0};
  return o;
}

double ratio(long long num, long long den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string lowered(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// "left of the tennis court" -> ("left of", "tennis court")
std::pair<std::string, std::string> split_relation(const std::string& rel) {
  static const char* kPredicates[] = {"left of", "right of", "above", "below", "near"};
  const std::string r = lowered(rel);
  for (const char* p : kPredicates) {
    const std::string pred(p);
    if (r.rfind(pred, 0) == 0) {
      std::string rest = r.substr(pred.size());
      rest.erase(0, rest.find_first_not_of(' '));
      if (rest.rfind("the ", 0) == 0) rest = rest.substr(4);
      return {pred, rest};
    }
  }
  return {"", r};
}

}  // namespace

ReferenceReward reference_reward(const SyntheticScene& scene, const GeoContext& ctx,
                                 const PixelRect& region, double alpha) {
  const Box reg = box_of(region);
  const std::string object = lowered(ctx.object);

  // Entities of the queried label with at least half their area inside.
  std::vector<std::size_t> visible;
  for (std::size_t i = 0; i < scene.entities.size(); ++i) {
    const auto& e = scene.entities[i];
    if (lowered(e.label) != object) continue;
    const Box b = box_of(e.box);
    if (2 * overlap(b, reg).area() >= b.area()) visible.push_back(i);
  }
  int positives = visible.empty() ? 0 : 1;
  int total = 1;
  if (ctx.position) {
    ++total;
    bool any = false;
    for (auto i : visible) {
      for (const auto& t : scene.entities[i].tags) any = any || lowered(t) == lowered(*ctx.position);
    }
    positives += any ? 1 : 0;
  }
  for (const auto& rel : ctx.relations) {
    ++total;
    const auto [pred, label] = split_relation(rel);
    bool holds = false;
    for (auto i : visible) {
      for (const auto& f : scene.relations) {
        holds = holds || (f.subject == static_cast<int>(i) && f.predicate == pred &&
                          lowered(scene.entities[static_cast<std::size_t>(f.object)].label) == label);
      }
    }
    positives += holds ? 1 : 0;
  }

  ReferenceReward out;
  out.r_qa = ratio(positives, total);

  // Box of the label-matching entity overlapping the region most (first on
  // ties), cut to the region, against the centered half-size box.
  long long best_area = 0;
  Box seen{0, 0, 0, 0};
  for (const auto& e : scene.entities) {
    if (lowered(e.label) != object) continue;
    const Box o = overlap(box_of(e.box), reg);
    if (o.area() > best_area) {
      best_area = o.area();
      seen = o;
    }
  }
  if (best_area > 0) {
    const long long w = reg.x2 - reg.x1;
    const long long h = reg.y2 - reg.y1;
    const long long cw = w - w / 2;  // ceil(w / 2)
    const long long ch = h - h / 2;
    const Box center{reg.x1 + (w - cw) / 2, reg.y1 + (h - ch) / 2, reg.x1 + (w - cw) / 2 + cw,
                     reg.y1 + (h - ch) / 2 + ch};
    const long long inter = overlap(seen, center).area();
    out.r_iou = ratio(inter, seen.area() + center.area() - inter);
  }
  out.r_total = alpha * out.r_qa + (1.0 - alpha) * out.r_iou;
  return out;
}

std::vector<PixelRect> enumerate_zoom_in_regions(ImageExtent extent, int depth) {
  std::vector<PixelRect> all{PixelRect{0, 0, extent.width, extent.height}};
  std::vector<PixelRect> level = all;
  // Cell boundaries at floor(k * side / 3 + 1/2).
  auto edge = [](int origin, int side, int k) {
    return origin + static_cast<int>((2LL * k * side + 3) / 6);
  };
  for (int d = 0; d < depth; ++d) {
    std::vector<PixelRect> next;
    for (const auto& r : level) {
      for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 3; ++col) {
          next.push_back({edge(r.x1, r.width(), col), edge(r.y1, r.height(), row),
                          edge(r.x1, r.width(), col + 1), edge(r.y1, r.height(), row + 1)});
        }
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return all;
}

}  // namespace geosearch::testing
