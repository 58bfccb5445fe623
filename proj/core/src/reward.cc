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

#include "geosearch/reward.h"

#include <mutex>

#include "geosearch/error.h"

namespace geosearch {

void to_json(nlohmann::json& j, const RewardBreakdown& b) {
  j = nlohmann::json{{"r_qa", b.r_qa},
                     {"r_iou", b.r_iou},
                     {"r_total", b.r_total},
                     {"alpha", b.alpha},
                     {"verdict", b.verdict},
                     {"predicted_box", b.predicted_box ? nlohmann::json(*b.predicted_box)
                                                       : nlohmann::json(nullptr)}};
}

void from_json(const nlohmann::json& j, RewardBreakdown& b) {
  b.r_qa = j.at("r_qa").get<double>();
  b.r_iou = j.at("r_iou").get<double>();
  b.r_total = j.at("r_total").get<double>();
  b.alpha = j.at("alpha").get<double>();
  b.verdict = j.at("verdict").get<QAVerdict>();
  b.predicted_box.reset();
  if (j.contains("predicted_box") && !j["predicted_box"].is_null()) {
    b.predicted_box = j["predicted_box"].get<PixelRect>();
  }
}

double qa_reward(const QAVerdict& verdict) {
  int positive = verdict.object_present ? 1 : 0;
  int total = 1;
  if (verdict.position_match) {
    ++total;
    positive += *verdict.position_match ? 1 : 0;
  }
  for (const bool r : verdict.relation_match) {
    ++total;
    positive += r ? 1 : 0;
  }
  return static_cast<double>(positive) / total;
}

double iou_reward(const std::optional<PixelRect>& predicted, const PixelRect& region) {
  if (!predicted || !predicted->valid()) return 0.0;
  const PixelRect frame{0, 0, region.width(), region.height()};
  return iou(*predicted, central_box(frame));
}

double combine(double r_qa, double r_iou, double alpha) {
  return alpha * r_qa + (1.0 - alpha) * r_iou;
}

std::optional<RewardCache::Evidence> RewardCache::find(
    const std::string& image_digest, const PixelRect& region,
    const std::string& query_digest) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(Key{image_digest, region, query_digest});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void RewardCache::insert(const std::string& image_digest, const PixelRect& region,
                         const std::string& query_digest, Evidence evidence) {
  std::unique_lock lock(mu_);
  entries_.emplace(Key{image_digest, region, query_digest}, std::move(evidence));
}

std::size_t RewardCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

RewardBreakdown evaluate_region(const RegionView& view, const GeoContext& ctx,
                                Oracle& oracle, RewardCache& cache, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "alpha must lie in [0, 1]");
  }
  if (!view.region.valid() || !view.image.extent().contains(view.region)) {
    throw Error(ErrorKind::kOutOfBounds,
                "region " + to_string(view.region) + " is outside the image");
  }
  const std::string query_digest = ctx.digest();
  auto evidence = cache.find(view.image.digest(), view.region, query_digest);
  if (!evidence) {
    RewardCache::Evidence fresh;
    fresh.verdict = oracle.qa_verify(view, ctx);
    check_verdict_shape(fresh.verdict, ctx);
    fresh.predicted_box = oracle.predict_box(view, ctx.object);
    cache.insert(view.image.digest(), view.region, query_digest, fresh);
    evidence = std::move(fresh);
  }

  RewardBreakdown b;
  b.alpha = alpha;
  b.verdict = evidence->verdict;
  b.predicted_box = evidence->predicted_box;
  b.r_qa = qa_reward(b.verdict);
  b.r_iou = iou_reward(b.predicted_box, view.region);
  b.r_total = combine(b.r_qa, b.r_iou, alpha);
  return b;
}

}  // namespace geosearch
