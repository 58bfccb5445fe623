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

#include <gtest/gtest.h>

#include <fstream>

#include "geosearch/digest.h"
#include "geosearch/error.h"
#include "geosearch/oracle.h"
#include "geosearch/query.h"
#include "geosearch/replay.h"
#include "geosearch/synthetic_oracle.h"
#include "support/test_support.h"

namespace geosearch {
namespace {

using testing::SyntheticWorld;
using testing::TempDir;

SceneEntity entity(std::string label, PixelRect box, bool target = false,
                   std::vector<std::string> tags = {}) {
  return SceneEntity{std::move(label), box, std::move(tags), target};
}

// Airplane target left of a hangar, a second airplane right of it.
SyntheticScene airfield() {
  return testing::scene_of({1000, 1000},
                           {entity("airplane", {100, 100, 150, 150}, true, {"largest"}),
                            entity("hangar", {300, 100, 360, 160}),
                            entity("airplane", {700, 600, 740, 640})},
                           "the largest airplane left of the hangar");
}

// ---- query -----------------------------------------------------------------

TEST(QueryTest, RawQueryRejectsBlank) {
  EXPECT_THROW(RawQuery("   "), Error);
  EXPECT_EQ(RawQuery("ship").text(), "ship");
}

TEST(QueryTest, HeuristicStructure) {
  const GeoContext a = heuristic_structure(RawQuery("the airplane"));
  EXPECT_EQ(a.object, "airplane");
  EXPECT_FALSE(a.position);
  EXPECT_TRUE(a.relations.empty());

  const GeoContext b =
      heuristic_structure(RawQuery("the largest baseball field left of the tennis court"));
  EXPECT_EQ(b.object, "baseball field");
  EXPECT_EQ(b.position, "largest");
  EXPECT_EQ(b.relations, std::vector<std::string>{"left of the tennis court"});

  const GeoContext c = heuristic_structure(RawQuery("ship near the pier"));
  EXPECT_EQ(c.object, "ship");
  EXPECT_FALSE(c.position);
  EXPECT_EQ(c.relations, std::vector<std::string>{"near the pier"});
  EXPECT_EQ(b.element_count(), 3);
  EXPECT_EQ(c.element_count(), 2);
}

TEST(QueryTest, ParseRelation) {
  const auto r = parse_relation("left of the tennis court");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->predicate, "left of");
  EXPECT_EQ(r->label, "tennis court");
  EXPECT_FALSE(parse_relation("across from the river"));
}

TEST(QueryTest, ProvidedStructureIsReturnedVerbatim) {
  SyntheticWorld world(airfield());
  const GeoContext given{"thing", std::nullopt, {"above the roof"}};
  EXPECT_EQ(structure_query(RawQuery("whatever"), given, *world.oracle), given);
  const nlohmann::json j = given;
  EXPECT_EQ(j.get<GeoContext>(), given);
}

TEST(QueryTest, ValidateRejectsEmptyParts) {
  EXPECT_THROW((GeoContext{"", std::nullopt, {}}.validate()), Error);
  EXPECT_THROW((GeoContext{"ship", std::nullopt, {""}}.validate()), Error);
}

// ---- synthetic oracle ------------------------------------------------------

TEST(SyntheticOracleTest, QaContainment) {
  SyntheticWorld world(airfield());
  const GeoContext ctx{"airplane", std::nullopt, {}};
  EXPECT_TRUE(world.oracle->qa_verify({world.image, {0, 0, 300, 300}}, ctx).object_present);
  EXPECT_FALSE(world.oracle->qa_verify({world.image, {400, 0, 600, 300}}, ctx).object_present);
  // 40% of the target visible, threshold 50%.
  EXPECT_FALSE(world.oracle->qa_verify({world.image, {0, 0, 120, 300}}, ctx).object_present);
}

TEST(SyntheticOracleTest, QaChecksPositionAndRelations) {
  SyntheticWorld world(airfield());
  const GeoContext ctx{"airplane", "largest", {"left of the hangar"}};
  const QAVerdict near = world.oracle->qa_verify({world.image, {0, 0, 400, 400}}, ctx);
  EXPECT_TRUE(near.object_present);
  EXPECT_EQ(near.position_match, true);
  EXPECT_EQ(near.relation_match, std::vector<bool>{true});
  // Only the distractor airplane is visible here.
  const QAVerdict far = world.oracle->qa_verify({world.image, {600, 500, 900, 800}}, ctx);
  EXPECT_TRUE(far.object_present);
  EXPECT_EQ(far.position_match, false);
  EXPECT_EQ(far.relation_match, std::vector<bool>{false});
  check_verdict_shape(near, ctx);
}

TEST(SyntheticOracleTest, PredictBox) {
  SyntheticWorld world(testing::scene_of({1000, 1000},
                                         {entity("airplane", {100, 100, 150, 150}, true)}));
  EXPECT_EQ(world.oracle->predict_box({world.image, {0, 0, 300, 300}}, "airplane"),
            (PixelRect{100, 100, 150, 150}));
  EXPECT_EQ(world.oracle->predict_box({world.image, {120, 0, 300, 300}}, "airplane"),
            (PixelRect{0, 100, 30, 150}));
  EXPECT_EQ(world.oracle->predict_box({world.image, {500, 500, 900, 900}}, "airplane"),
            std::nullopt);
}

TEST(SyntheticOracleTest, ChooseCell) {
  const GeoContext ctx{"airplane", std::nullopt, {}};
  auto cell_for = [&](PixelRect target) {
    SyntheticWorld world(testing::scene_of({900, 900}, {entity("airplane", target, true)}));
    return world.oracle->choose_cell({world.image, {0, 0, 900, 900}}, ctx).index();
  };
  EXPECT_EQ(cell_for({440, 440, 460, 460}), 5);
  EXPECT_EQ(cell_for({800, 440, 820, 460}), 6);
  EXPECT_EQ(cell_for({0, 0, 2, 2}), 1);
}

TEST(SyntheticOracleTest, ConditionalGroundNoiseFree) {
  SyntheticWorld world(airfield());
  const RawQuery q("the airplane");
  EXPECT_EQ(world.oracle->conditional_ground({world.image, {0, 0, 300, 300}}, q),
            (PixelRect{100, 100, 150, 150}));
  EXPECT_EQ(world.oracle->conditional_ground({world.image, world.image.extent().rect()}, q),
            (PixelRect{100, 100, 150, 150}));
}

TEST(SyntheticOracleTest, ConditionalGroundJitterMostlyOverlaps) {
  const SyntheticScene scene =
      testing::scene_of({1000, 1000}, {entity("tank", {400, 400, 464, 464}, true)});
  int good = 0;
  constexpr int kDraws = 400;
  for (int s = 0; s < kDraws; ++s) {
    NoiseConfig n;
    n.box_jitter_px = 4.0;
    n.seed = static_cast<std::uint64_t>(s);
    SyntheticWorld world(scene, n);
    const PixelRect b = world.oracle->conditional_ground(
        {world.image, world.image.extent().rect()}, RawQuery("the tank"));
    if (iou(b, scene.target().box) >= 0.5) ++good;
  }
  EXPECT_GE(good, kDraws * 99 / 100);
}

TEST(SyntheticOracleTest, NoiseIsPureFunctionOfCall) {
  NoiseConfig n;
  n.qa_flip_prob = 0.5;
  n.box_jitter_frac = 0.05;
  n.cell_error_prob = 0.5;
  n.seed = 12;
  SyntheticWorld a(airfield(), n);
  SyntheticWorld b(airfield(), n);
  const GeoContext ctx{"airplane", "largest", {"left of the hangar"}};
  for (int x = 0; x < 600; x += 50) {
    const PixelRect r{x, 0, x + 400, 400};
    EXPECT_EQ(a.oracle->qa_verify({a.image, r}, ctx), b.oracle->qa_verify({b.image, r}, ctx));
    EXPECT_EQ(a.oracle->predict_box({a.image, r}, "airplane"),
              a.oracle->predict_box({a.image, r}, "airplane"));
    EXPECT_EQ(a.oracle->choose_cell({a.image, r}, ctx), b.oracle->choose_cell({b.image, r}, ctx));
  }
}

TEST(SyntheticOracleTest, VisibleFraction) {
  EXPECT_DOUBLE_EQ(visible_fraction({0, 0, 10, 10}, {0, 0, 4, 10}), 0.4);
  EXPECT_DOUBLE_EQ(visible_fraction({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0);
}

// ---- call digests ------------------------------------------------------------

TEST(OracleCallTest, DigestsAreStable) {
  const Raster img = testing::blank_raster({64, 64}, "digest");
  const GeoContext ctx{"ship", "largest", {"near the pier"}};
  const OracleCall a = qa_verify_call({img, {0, 0, 32, 32}}, ctx);
  EXPECT_EQ(a.kind, CallKind::kQaVerify);
  EXPECT_EQ(a.digest.size(), 64u);
  EXPECT_EQ(a.digest, qa_verify_call({img, {0, 0, 32, 32}}, ctx).digest);
  EXPECT_NE(a.digest, qa_verify_call({img, {0, 0, 32, 33}}, ctx).digest);
  EXPECT_NE(parse_call(RawQuery("ship")).digest, parse_call(RawQuery("ships")).digest);
  // Content addressed: the source name does not matter.
  const Raster renamed = testing::blank_raster({64, 64}, "other");
  EXPECT_EQ(a.digest, qa_verify_call({renamed, {0, 0, 32, 32}}, ctx).digest);
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  // Pinned value guards against accidental serialization changes.
  EXPECT_EQ(parse_call(RawQuery("ship near the pier")).digest, "8a6bcdf40525ce6b0b25de3e85913a9c6bcf57d1008086d9584099fad1c093bb");
}

// ---- caching -------------------------------------------------------------------

class CountingOracle final : public Oracle {
 public:
  explicit CountingOracle(Oracle& inner) : inner_(inner) {}
  GeoContext parse(const RawQuery& q) override { ++calls; return inner_.parse(q); }
  QAVerdict qa_verify(const RegionView& v, const GeoContext& c) override {
    ++calls;
    return inner_.qa_verify(v, c);
  }
  std::optional<PixelRect> predict_box(const RegionView& v, const std::string& o) override {
    ++calls;
    return inner_.predict_box(v, o);
  }
  GridCell choose_cell(const RegionView& v, const GeoContext& c) override {
    ++calls;
    return inner_.choose_cell(v, c);
  }
  PixelRect conditional_ground(const RegionView& v, const RawQuery& q) override {
    ++calls;
    return inner_.conditional_ground(v, q);
  }
  int calls = 0;

 private:
  Oracle& inner_;
};

TEST(CachingOracleTest, RepeatCallsHitCache) {
  SyntheticWorld world(airfield());
  CountingOracle counting(*world.oracle);
  CachingOracle cache(counting);
  const GeoContext ctx{"airplane", std::nullopt, {}};
  const RegionView v{world.image, {0, 0, 300, 300}};
  const QAVerdict first = cache.qa_verify(v, ctx);
  EXPECT_EQ(cache.qa_verify(v, ctx), first);
  EXPECT_EQ(cache.predict_box(v, "airplane"), cache.predict_box(v, "airplane"));
  EXPECT_EQ(counting.calls, 2);
  EXPECT_EQ(cache.inner_calls(), 2);
  EXPECT_EQ(cache.inner_calls(CallKind::kQaVerify), 1);
  EXPECT_EQ(cache.hits(), 2);
}

// ---- record / replay -------------------------------------------------------------

TEST(ReplayTest, RecordThenReplay) {
  TempDir dir;
  SyntheticWorld world(airfield());
  const GeoContext ctx{"airplane", "largest", {"left of the hangar"}};
  const RawQuery q("the largest airplane left of the hangar");
  std::vector<nlohmann::json> live;
  {
    FixtureWriter writer(dir / "fx.jsonl");
    RecordingOracle rec(*world.oracle, writer);
    live.push_back(ResponseCodec<GeoContext>::encode(rec.parse(q)));
    live.push_back(ResponseCodec<QAVerdict>::encode(rec.qa_verify({world.image, {0, 0, 500, 500}}, ctx)));
    live.push_back(ResponseCodec<std::optional<PixelRect>>::encode(
        rec.predict_box({world.image, {600, 0, 900, 300}}, "airplane")));
    live.push_back(ResponseCodec<GridCell>::encode(rec.choose_cell({world.image, {0, 0, 900, 900}}, ctx)));
    live.push_back(ResponseCodec<PixelRect>::encode(rec.conditional_ground({world.image, {0, 0, 500, 500}}, q)));
  }
  const FixtureStore store({dir / "fx.jsonl"});
  EXPECT_EQ(store.size(), 5u);
  ReplayOracle replay(store);
  EXPECT_EQ(ResponseCodec<GeoContext>::encode(replay.parse(q)), live[0]);
  EXPECT_EQ(ResponseCodec<QAVerdict>::encode(replay.qa_verify({world.image, {0, 0, 500, 500}}, ctx)), live[1]);
  EXPECT_EQ(ResponseCodec<std::optional<PixelRect>>::encode(
                replay.predict_box({world.image, {600, 0, 900, 300}}, "airplane")),
            live[2]);
  EXPECT_EQ(ResponseCodec<GridCell>::encode(replay.choose_cell({world.image, {0, 0, 900, 900}}, ctx)), live[3]);
  EXPECT_EQ(ResponseCodec<PixelRect>::encode(replay.conditional_ground({world.image, {0, 0, 500, 500}}, q)), live[4]);

  try {
    replay.parse(RawQuery("the smallest airplane"));
    FAIL() << "expected FixtureMiss";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFixtureMiss);
  }
}

TEST(ReplayTest, FixturesUnion) {
  TempDir dir;
  SyntheticWorld world(airfield());
  {
    FixtureWriter w1(dir / "a.jsonl");
    RecordingOracle r1(*world.oracle, w1);
    r1.parse(RawQuery("the airplane"));
    FixtureWriter w2(dir / "b.jsonl");
    RecordingOracle r2(*world.oracle, w2);
    r2.parse(RawQuery("the hangar"));
  }
  const FixtureStore store({dir / "a.jsonl", dir / "b.jsonl"});
  ReplayOracle replay(store);
  EXPECT_EQ(replay.parse(RawQuery("the airplane")).object, "airplane");
  EXPECT_EQ(replay.parse(RawQuery("the hangar")).object, "hangar");
}

TEST(ReplayTest, MalformedFixtureLine) {
  TempDir dir;
  std::ofstream(dir / "bad.jsonl") << "{\"digest\": 3}\n";
  EXPECT_THROW(FixtureStore({dir / "bad.jsonl"}), Error);
}

}  // namespace
}  // namespace geosearch
