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
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "geosearch/oracle.h"
#include "geosearch/scene.h"
#include "json.hpp"

namespace geosearch {

// Noise model of the simulated multimodal model. Box jitter is Gaussian per
// corner with sigma = jitter_px + jitter_frac * (longer side of the image the
// model is looking at), so a tighter crop yields a sharper box.
struct NoiseConfig {
  double box_jitter_px = 0.0;
  double box_jitter_frac = 0.0;
  double qa_flip_prob = 0.0;
  double cell_error_prob = 0.0;
  std::uint64_t seed = 0;

  bool noise_free() const noexcept {
    return box_jitter_px == 0.0 && box_jitter_frac == 0.0 &&
           qa_flip_prob == 0.0 && cell_error_prob == 0.0;
  }
  void validate() const;
};

void to_json(nlohmann::json& j, const NoiseConfig& n);
void from_json(const nlohmann::json& j, NoiseConfig& n);

// Maps image sources to scenes. Unregistered images resolve lazily to the
// "<stem>.scene.json" file beside them.
class SceneRegistry {
 public:
  void add(const std::string& source, SyntheticScene scene);
  const SyntheticScene& find(const std::string& source);

 private:
  std::mutex mu_;
  std::unordered_map<std::string, std::unique_ptr<SyntheticScene>> scenes_;
};

// Oracle whose answers are computed exactly from a SyntheticScene, then
// perturbed by NoiseConfig. Noise draws are seeded by (seed, call digest),
// so identical calls always agree regardless of call order or thread.
class SyntheticOracle final : public Oracle {
 public:
  SyntheticOracle(std::shared_ptr<SceneRegistry> scenes, NoiseConfig noise,
                  double visibility_threshold = 0.5);

  GeoContext parse(const RawQuery& query) override;
  QAVerdict qa_verify(const RegionView& view, const GeoContext& ctx) override;
  std::optional<PixelRect> predict_box(const RegionView& view,
                                       const std::string& object) override;
  GridCell choose_cell(const RegionView& view, const GeoContext& ctx) override;
  PixelRect conditional_ground(const RegionView& cue,
                               const RawQuery& query) override;

  const NoiseConfig& noise() const noexcept { return noise_; }

 private:
  double sigma_for(const PixelRect& viewed) const noexcept;

  std::shared_ptr<SceneRegistry> scenes_;
  NoiseConfig noise_;
  double visibility_threshold_;
};

// Fraction of `entity`'s area inside `region`.
double visible_fraction(const PixelRect& entity, const PixelRect& region);

}  // namespace geosearch
