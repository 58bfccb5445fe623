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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support/test_support.h"

namespace geosearch {
namespace {

QAVerdict verdict(bool object, std::optional<bool> position, std::vector<bool> relations) {
  return QAVerdict{object, position, std::move(relations)};
}

TEST(QaRewardTest, Examples) {
  EXPECT_EQ(qa_reward(verdict(true, true, {true})), 1.0);
  EXPECT_DOUBLE_EQ(qa_reward(verdict(true, false, {true})), 2.0 / 3.0);
  EXPECT_EQ(qa_reward(verdict(true, std::nullopt, {})), 1.0);
  EXPECT_EQ(qa_reward(verdict(false, std::nullopt, {})), 0.0);
}

TEST(QaRewardTest, PermutationInvariant) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<bool> rel(1 + rng() % 6);
    for (std::size_t k = 0; k < rel.size(); ++k) rel[k] = (rng() & 1) != 0;
    const double base = qa_reward(verdict(true, std::nullopt, rel));
    std::vector<bool> shuffled = rel;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(qa_reward(verdict(true, std::nullopt, shuffled)), base);
  }
}

TEST(IouRewardTest, Examples) {
  const PixelRect region{0, 0, 400, 200};
  EXPECT_EQ(iou_reward(PixelRect{100, 50, 300, 150}, region), 1.0);
  EXPECT_EQ(iou_reward(std::nullopt, region), 0.0);
  EXPECT_DOUBLE_EQ(iou_reward(PixelRect{200, 50, 400, 150}, region), 1.0 / 3.0);
}

TEST(IouRewardTest, UsesRegionLocalFrame) {
  // Same local prediction, region anywhere in the image.
  EXPECT_EQ(iou_reward(PixelRect{100, 50, 300, 150}, {500, 700, 900, 900}), 1.0);
}

TEST(IouRewardTest, OneOnlyForCentralBox) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> d(0, 60);
  const PixelRect region{0, 0, 61, 61};
  const PixelRect c = central_box({0, 0, 61, 61});
  for (int i = 0; i < 5000; ++i) {
    int x1 = d(rng), x2 = d(rng), y1 = d(rng), y2 = d(rng);
    if (x1 == x2 || y1 == y2) continue;
    const PixelRect p{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
    const double r = iou_reward(p, region);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
    EXPECT_EQ(r == 1.0, p == c);
  }
}

TEST(CombineTest, Examples) {
  EXPECT_EQ(combine(0.3, 0.8, 0.0), 0.8);
  EXPECT_EQ(combine(0.3, 0.8, 1.0), 0.3);
  EXPECT_DOUBLE_EQ(combine(1.0, 0.5, 0.1), 0.55);
}

TEST(CombineTest, AffineInAlpha) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double q = u(rng), r = u(rng), a = u(rng), b = u(rng);
    if (a == b) continue;
    const double slope = (combine(q, r, a) - combine(q, r, b)) / (a - b);
    EXPECT_NEAR(slope, q - r, 1e-9);
  }
}

TEST(EvaluateRegionTest, SyntheticExamples) {
  const SyntheticScene scene = testing::scene_of(
      {1000, 1000}, {SceneEntity{"tank", {100, 100, 150, 150}, {}, true}}, "the tank");
  testing::SyntheticWorld world(scene);
  RewardCache cache;
  const GeoContext ctx{"tank", std::nullopt, {}};

  const RewardBreakdown tight =
      evaluate_region({world.image, {75, 75, 175, 175}}, ctx, *world.oracle, cache, 0.1);
  EXPECT_EQ(tight.r_qa, 1.0);
  EXPECT_GT(tight.r_iou, 0.5);
  EXPECT_EQ(tight.r_total, combine(tight.r_qa, tight.r_iou, 0.1));

  const RewardBreakdown away =
      evaluate_region({world.image, {500, 500, 900, 900}}, ctx, *world.oracle, cache, 0.1);
  EXPECT_FALSE(away.verdict.object_present);
  EXPECT_EQ(away.r_iou, 0.0);
  EXPECT_FALSE(away.predicted_box);
}

TEST(EvaluateRegionTest, CachedSecondEvaluation) {
  const SyntheticScene scene = testing::scene_of(
      {1000, 1000}, {SceneEntity{"tank", {100, 100, 150, 150}, {}, true}}, "the tank");
  testing::SyntheticWorld world(scene);
  CachingOracle counted(*world.oracle);
  RewardCache cache;
  const GeoContext ctx{"tank", std::nullopt, {}};
  const RegionView v{world.image, {0, 0, 400, 400}};
  const RewardBreakdown a = evaluate_region(v, ctx, counted, cache, 0.1);
  const int calls = counted.inner_calls();
  EXPECT_EQ(evaluate_region(v, ctx, counted, cache, 0.1), a);
  EXPECT_EQ(counted.inner_calls(), calls);
  // Alpha is applied on top of cached evidence.
  const RewardBreakdown b = evaluate_region(v, ctx, counted, cache, 0.7);
  EXPECT_EQ(counted.inner_calls(), calls);
  EXPECT_EQ(b.r_total, combine(a.r_qa, a.r_iou, 0.7));
  EXPECT_EQ(cache.size(), 1u);
}

TEST(EvaluateRegionTest, MatchesIndependentModel) {
  std::mt19937_64 rng(21);
  const SyntheticScene scene = testing::scene_of(
      {1000, 1000},
      {SceneEntity{"tank", {300, 300, 340, 330}, {"largest"}, true},
       SceneEntity{"pier", {420, 290, 470, 350}, {}, false},
       SceneEntity{"tank", {700, 100, 720, 120}, {"smallest"}, false}});
  testing::SyntheticWorld world(scene);
  const GeoContext ctx{"tank", "largest", {"left of the pier"}};
  std::uniform_int_distribution<int> d(0, 999);
  for (int i = 0; i < 500; ++i) {
    int x1 = d(rng), x2 = d(rng), y1 = d(rng), y2 = d(rng);
    if (std::abs(x1 - x2) < 2 || std::abs(y1 - y2) < 2) continue;
    const PixelRect r{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
    RewardCache cache;
    const RewardBreakdown got = evaluate_region({world.image, r}, ctx, *world.oracle, cache, 0.1);
    const auto want = testing::reference_reward(scene, ctx, r, 0.1);
    EXPECT_EQ(got.r_qa, want.r_qa) << r;
    EXPECT_EQ(got.r_iou, want.r_iou) << r;
    EXPECT_EQ(got.r_total, want.r_total) << r;
  }
}

TEST(RewardBreakdownTest, JsonRoundTrip) {
  RewardBreakdown b;
  b.r_qa = 0.5;
  b.r_iou = 0.25;
  b.alpha = 0.1;
  b.r_total = combine(0.5, 0.25, 0.1);
  b.verdict = verdict(true, false, {true, false});
  b.predicted_box = PixelRect{1, 2, 3, 4};
  const nlohmann::json j = b;
  EXPECT_EQ(j.get<RewardBreakdown>(), b);
}

}  // namespace
}  // namespace geosearch
