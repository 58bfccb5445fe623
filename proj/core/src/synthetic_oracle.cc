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

#include "geosearch/synthetic_oracle.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include "geosearch/digest.h"
#include "geosearch/error.h"

namespace geosearch {

namespace {

std::mt19937_64 rng_for(std::uint64_t seed, const OracleCall& call) {
  const std::uint64_t d = digest_prefix64(call.digest);
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(d),
                    static_cast<std::uint32_t>(d >> 32)};
  return std::mt19937_64(seq);
}

bool flip(std::mt19937_64& rng, double p) {
  if (p <= 0.0) return false;
  return std::bernoulli_distribution(p)(rng);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Per-corner Gaussian jitter, clipped to `bounds` and kept non-degenerate.
PixelRect jitter_box(const PixelRect& box, double sigma, const PixelRect& bounds,
                     std::mt19937_64& rng) {
  PixelRect out = box;
  if (sigma > 0.0) {
    std::normal_distribution<double> n(0.0, sigma);
    auto d = [&] { return static_cast<int>(std::lround(n(rng))); };
    out.x1 += d();
    out.y1 += d();
    out.x2 += d();
    out.y2 += d();
    if (out.x1 > out.x2) std::swap(out.x1, out.x2);
    if (out.y1 > out.y2) std::swap(out.y1, out.y2);
  }
  out.x1 = std::clamp(out.x1, bounds.x1, bounds.x2 - 1);
  out.y1 = std::clamp(out.y1, bounds.y1, bounds.y2 - 1);
  out.x2 = std::clamp(out.x2, out.x1 + 1, bounds.x2);
  out.y2 = std::clamp(out.y2, out.y1 + 1, bounds.y2);
  return out;
}

bool has_fact(const SyntheticScene& scene, int subject,
              const ParsedRelation& rel) {
  return std::any_of(scene.relations.begin(), scene.relations.end(),
                     [&](const RelationFact& f) {
                       return f.subject == subject && f.predicate == rel.predicate &&
                              lower(scene.entities[f.object].label) == rel.label;
                     });
}

}  // namespace

void NoiseConfig::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (box_jitter_px < 0.0 || box_jitter_frac < 0.0 || !prob(qa_flip_prob) ||
      !prob(cell_error_prob)) {
    throw Error(ErrorKind::kConfig, "noise parameters out of range");
  }
}

void to_json(nlohmann::json& j, const NoiseConfig& n) {
  j = nlohmann::json{{"box_jitter_px", n.box_jitter_px},
                     {"box_jitter_frac", n.box_jitter_frac},
                     {"qa_flip_prob", n.qa_flip_prob},
                     {"cell_error_prob", n.cell_error_prob},
                     {"seed", n.seed}};
}

void from_json(const nlohmann::json& j, NoiseConfig& n) {
  n.box_jitter_px = j.value("box_jitter_px", n.box_jitter_px);
  n.box_jitter_frac = j.value("box_jitter_frac", n.box_jitter_frac);
  n.qa_flip_prob = j.value("qa_flip_prob", n.qa_flip_prob);
  n.cell_error_prob = j.value("cell_error_prob", n.cell_error_prob);
  n.seed = j.value("seed", n.seed);
}

void SceneRegistry::add(const std::string& source, SyntheticScene scene) {
  scene.validate();
  std::lock_guard lock(mu_);
  scenes_[source] = std::make_unique<SyntheticScene>(std::move(scene));
}

const SyntheticScene& SceneRegistry::find(const std::string& source) {
  std::lock_guard lock(mu_);
  auto it = scenes_.find(source);
  if (it == scenes_.end()) {
    auto scene = std::make_unique<SyntheticScene>(load_scene(scene_path_for(source)));
    it = scenes_.emplace(source, std::move(scene)).first;
  }
  return *it->second;
}

double visible_fraction(const PixelRect& entity, const PixelRect& region) {
  if (entity.area() <= 0) return 0.0;
  return static_cast<double>(intersection_area(entity, region)) /
         static_cast<double>(entity.area());
}

SyntheticOracle::SyntheticOracle(std::shared_ptr<SceneRegistry> scenes,
                                 NoiseConfig noise, double visibility_threshold)
    : scenes_(std::move(scenes)),
      noise_(noise),
      visibility_threshold_(visibility_threshold) {
  noise_.validate();
}

double SyntheticOracle::sigma_for(const PixelRect& viewed) const noexcept {
  return noise_.box_jitter_px + noise_.box_jitter_frac * viewed.max_side();
}

GeoContext SyntheticOracle::parse(const RawQuery& query) {
  return heuristic_structure(query);
}

QAVerdict SyntheticOracle::qa_verify(const RegionView& view, const GeoContext& ctx) {
  const SyntheticScene& scene = scenes_->find(view.image.source());
  const std::string object = lower(ctx.object);

  std::vector<int> visible;
  for (std::size_t i = 0; i < scene.entities.size(); ++i) {
    const auto& e = scene.entities[i];
    if (lower(e.label) == object &&
        visible_fraction(e.box, view.region) >= visibility_threshold_) {
      visible.push_back(static_cast<int>(i));
    }
  }

  QAVerdict v;
  v.object_present = !visible.empty();
  if (ctx.position) {
    const std::string pos = lower(*ctx.position);
    v.position_match = std::any_of(visible.begin(), visible.end(), [&](int i) {
      const auto& tags = scene.entities[i].tags;
      return std::any_of(tags.begin(), tags.end(),
                         [&](const std::string& t) { return lower(t) == pos; });
    });
  }
  for (const auto& r : ctx.relations) {
    const auto parsed = parse_relation(r);
    const bool holds = parsed && std::any_of(visible.begin(), visible.end(),
                                             [&](int i) { return has_fact(scene, i, *parsed); });
    v.relation_match.push_back(holds);
  }

  if (noise_.qa_flip_prob > 0.0) {
    auto rng = rng_for(noise_.seed, qa_verify_call(view, ctx));
    const double p = noise_.qa_flip_prob;
    if (flip(rng, p)) v.object_present = !v.object_present;
    if (v.position_match && flip(rng, p)) *v.position_match = !*v.position_match;
    for (std::size_t i = 0; i < v.relation_match.size(); ++i) {
      if (flip(rng, p)) v.relation_match[i] = !v.relation_match[i];
    }
  }
  return v;
}

std::optional<PixelRect> SyntheticOracle::predict_box(const RegionView& view,
                                                      const std::string& object) {
  const SyntheticScene& scene = scenes_->find(view.image.source());
  const std::string label = lower(object);
  // Among matching entities, the one most visible in the region.
  int best = -1;
  std::int64_t best_area = 0;
  for (std::size_t i = 0; i < scene.entities.size(); ++i) {
    const auto& e = scene.entities[i];
    if (lower(e.label) != label) continue;
    const std::int64_t a = intersection_area(e.box, view.region);
    if (a > best_area) {
      best = static_cast<int>(i);
      best_area = a;
    }
  }
  if (best < 0) return std::nullopt;

  const PixelRect local =
      intersect(scene.entities[best].box, view.region)
          .translated(-view.region.x1, -view.region.y1);
  const PixelRect bounds{0, 0, view.region.width(), view.region.height()};
  const double sigma = sigma_for(view.region);
  if (sigma == 0.0) return local;
  auto rng = rng_for(noise_.seed, predict_box_call(view, object));
  return jitter_box(local, sigma, bounds, rng);
}

GridCell SyntheticOracle::choose_cell(const RegionView& view, const GeoContext& ctx) {
  const SyntheticScene& scene = scenes_->find(view.image.source());
  const PixelRect& t = scene.target().box;
  const std::int64_t tx = static_cast<std::int64_t>(t.x1) + t.x2;
  const std::int64_t ty = static_cast<std::int64_t>(t.y1) + t.y2;

  int best = 1;
  std::int64_t best_d = -1;
  for (int idx : kAllCells) {
    const PixelRect c = grid_cell(view.region, GridCell(idx));
    const std::int64_t dx = static_cast<std::int64_t>(c.x1) + c.x2 - tx;
    const std::int64_t dy = static_cast<std::int64_t>(c.y1) + c.y2 - ty;
    const std::int64_t d = dx * dx + dy * dy;
    if (best_d < 0 || d < best_d) {
      best = idx;
      best_d = d;
    }
  }
  if (noise_.cell_error_prob > 0.0) {
    auto rng = rng_for(noise_.seed, choose_cell_call(view, ctx));
    if (flip(rng, noise_.cell_error_prob)) {
      // Uniform over the eight other cells.
      const int k = std::uniform_int_distribution<int>(1, 8)(rng);
      best = k < best ? k : k + 1;
    }
  }
  return GridCell(best);
}

PixelRect SyntheticOracle::conditional_ground(const RegionView& cue,
                                              const RawQuery& query) {
  const SyntheticScene& scene = scenes_->find(cue.image.source());
  const PixelRect& t = scene.target().box;
  // A cue that shows the whole target sharpens the estimate; a cue that cuts
  // it or misses it leaves the model with the global view.
  const bool cue_holds_target = cue.region.contains(t);
  const double sigma =
      sigma_for(cue_holds_target ? cue.region : cue.image.extent().rect());
  if (sigma == 0.0) return t;
  auto rng = rng_for(noise_.seed, conditional_ground_call(cue, query));
  return jitter_box(t, sigma, cue.image.extent().rect(), rng);
}

}  // namespace geosearch
