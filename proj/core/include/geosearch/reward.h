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

#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>

#include "geosearch/geometry.h"
#include "geosearch/oracle.h"
#include "geosearch/query.h"
#include "json.hpp"

namespace geosearch {

// Reward of one region: semantic (QA) term, geometric (IoU vs. central box)
// term, and their convex combination.
struct RewardBreakdown {
  double r_qa = 0.0;
  double r_iou = 0.0;
  double r_total = 0.0;
  double alpha = 0.0;
  QAVerdict verdict;
  std::optional<PixelRect> predicted_box;  // region-local

  friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

void to_json(nlohmann::json& j, const RewardBreakdown& b);
void from_json(const nlohmann::json& j, RewardBreakdown& b);

// Fraction of positive answers over the elements present in the verdict.
double qa_reward(const QAVerdict& verdict);

// IoU of the region-local prediction with the central box of a
// region-sized frame; 0 when nothing was predicted.
double iou_reward(const std::optional<PixelRect>& predicted, const PixelRect& region);

// alpha * r_qa + (1 - alpha) * r_iou
double combine(double r_qa, double r_iou, double alpha);

// Oracle evidence per (image, region, query). Alpha is applied on top, so one
// entry serves every weighting.
class RewardCache {
 public:
  struct Evidence {
    QAVerdict verdict;
    std::optional<PixelRect> predicted_box;
  };

  std::optional<Evidence> find(const std::string& image_digest,
                               const PixelRect& region,
                               const std::string& query_digest) const;
  void insert(const std::string& image_digest, const PixelRect& region,
              const std::string& query_digest, Evidence evidence);
  std::size_t size() const;

 private:
  using Key = std::tuple<std::string, PixelRect, std::string>;
  mutable std::shared_mutex mu_;
  std::map<Key, Evidence> entries_;
};

// Asks the oracle to verify the query elements and to box the main object,
// then composes the breakdown. Cached regions issue no oracle calls.
RewardBreakdown evaluate_region(const RegionView& view, const GeoContext& ctx,
                                Oracle& oracle, RewardCache& cache, double alpha);

}  // namespace geosearch
