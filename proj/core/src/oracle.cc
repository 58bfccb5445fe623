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

#include "geosearch/oracle.h"

#include <mutex>

#include "geosearch/digest.h"
#include "geosearch/error.h"

namespace geosearch {

namespace {

constexpr CallKind kAllKinds[] = {CallKind::kParse, CallKind::kQaVerify,
                                  CallKind::kPredictBox, CallKind::kChooseCell,
                                  CallKind::kConditionalGround};

void hash_region(Sha256& h, const RegionView& view) {
  h.field(view.image.digest());
  h.field(view.region.x1);
  h.field(view.region.y1);
  h.field(view.region.x2);
  h.field(view.region.y2);
}

Sha256 start(CallKind kind) {
  Sha256 h;
  h.field("geosearch-oracle-call/1");
  h.field(to_string(kind));
  return h;
}

[[noreturn]] void malformed(const std::string& what, const nlohmann::json& j) {
  throw Error(ErrorKind::kMalformedResponse, what + ": " + j.dump());
}

}  // namespace

std::string_view to_string(CallKind kind) {
  switch (kind) {
    case CallKind::kParse: return "parse";
    case CallKind::kQaVerify: return "qa_verify";
    case CallKind::kPredictBox: return "predict_box";
    case CallKind::kChooseCell: return "choose_cell";
    case CallKind::kConditionalGround: return "conditional_ground";
  }
  return "unknown";
}

CallKind call_kind_from_string(std::string_view name) {
  for (CallKind k : kAllKinds) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::kInvalidArgument,
              "unknown oracle call kind '" + std::string(name) + "'");
}

void to_json(nlohmann::json& j, const QAVerdict& v) {
  j = nlohmann::json{
      {"object_present", v.object_present},
      {"position_match", v.position_match ? nlohmann::json(*v.position_match)
                                          : nlohmann::json(nullptr)},
      {"relation_match", v.relation_match}};
}

void from_json(const nlohmann::json& j, QAVerdict& v) {
  if (!j.is_object() || !j.contains("object_present") ||
      !j["object_present"].is_boolean()) {
    malformed("verdict needs a boolean object_present", j);
  }
  v.object_present = j["object_present"].get<bool>();
  v.position_match.reset();
  if (j.contains("position_match") && !j["position_match"].is_null()) {
    if (!j["position_match"].is_boolean()) {
      malformed("position_match must be boolean or null", j);
    }
    v.position_match = j["position_match"].get<bool>();
  }
  v.relation_match.clear();
  if (j.contains("relation_match") && !j["relation_match"].is_null()) {
    if (!j["relation_match"].is_array()) malformed("relation_match must be an array", j);
    for (const auto& b : j["relation_match"]) {
      if (!b.is_boolean()) malformed("relation_match entries must be boolean", j);
      v.relation_match.push_back(b.get<bool>());
    }
  }
}

void check_verdict_shape(const QAVerdict& v, const GeoContext& ctx) {
  if (v.position_match.has_value() != ctx.position.has_value()) {
    throw Error(ErrorKind::kMalformedResponse,
                "position_match must be present iff the query has a position");
  }
  if (v.relation_match.size() != ctx.relations.size()) {
    throw Error(ErrorKind::kMalformedResponse,
                "relation_match has " + std::to_string(v.relation_match.size()) +
                    " entries for " + std::to_string(ctx.relations.size()) +
                    " relations");
  }
}

OracleCall parse_call(const RawQuery& query) {
  Sha256 h = start(CallKind::kParse);
  h.field(query.text());
  return {CallKind::kParse, h.hex_digest()};
}

OracleCall qa_verify_call(const RegionView& view, const GeoContext& ctx) {
  Sha256 h = start(CallKind::kQaVerify);
  hash_region(h, view);
  h.field(nlohmann::json(ctx).dump());
  return {CallKind::kQaVerify, h.hex_digest()};
}

OracleCall predict_box_call(const RegionView& view, const std::string& object) {
  Sha256 h = start(CallKind::kPredictBox);
  hash_region(h, view);
  h.field(object);
  return {CallKind::kPredictBox, h.hex_digest()};
}

OracleCall choose_cell_call(const RegionView& view, const GeoContext& ctx) {
  Sha256 h = start(CallKind::kChooseCell);
  hash_region(h, view);
  h.field(nlohmann::json(ctx).dump());
  return {CallKind::kChooseCell, h.hex_digest()};
}

OracleCall conditional_ground_call(const RegionView& cue, const RawQuery& query) {
  Sha256 h = start(CallKind::kConditionalGround);
  hash_region(h, cue);
  h.field(query.text());
  return {CallKind::kConditionalGround, h.hex_digest()};
}

// ---- codecs ----------------------------------------------------------------

nlohmann::json ResponseCodec<GeoContext>::encode(const GeoContext& v) {
  return nlohmann::json(v);
}
GeoContext ResponseCodec<GeoContext>::decode(const nlohmann::json& j) {
  return j.get<GeoContext>();
}

nlohmann::json ResponseCodec<QAVerdict>::encode(const QAVerdict& v) {
  return nlohmann::json(v);
}
QAVerdict ResponseCodec<QAVerdict>::decode(const nlohmann::json& j) {
  return j.get<QAVerdict>();
}

nlohmann::json ResponseCodec<std::optional<PixelRect>>::encode(
    const std::optional<PixelRect>& v) {
  return {{"box", v ? nlohmann::json(*v) : nlohmann::json(nullptr)}};
}
std::optional<PixelRect> ResponseCodec<std::optional<PixelRect>>::decode(
    const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("box")) malformed("expected {\"box\": ...}", j);
  if (j["box"].is_null()) return std::nullopt;
  try {
    return j["box"].get<PixelRect>();
  } catch (const Error&) {
    malformed("bad box", j);
  }
}

nlohmann::json ResponseCodec<PixelRect>::encode(const PixelRect& v) {
  return {{"box", v}};
}
PixelRect ResponseCodec<PixelRect>::decode(const nlohmann::json& j) {
  auto box = ResponseCodec<std::optional<PixelRect>>::decode(j);
  if (!box) malformed("expected a box", j);
  return *box;
}

nlohmann::json ResponseCodec<GridCell>::encode(const GridCell& v) {
  return {{"cell", v.index()}};
}
GridCell ResponseCodec<GridCell>::decode(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("cell") || !j["cell"].is_number_integer()) {
    malformed("expected {\"cell\": 1..9}", j);
  }
  const int cell = j["cell"].get<int>();
  if (cell < 1 || cell > 9) malformed("cell out of range", j);
  return GridCell(cell);
}

// ---- caching ---------------------------------------------------------------

template <typename T, typename Fn>
T CachingOracle::through(const OracleCall& call, Fn&& live) {
  {
    std::shared_lock lock(mu_);
    if (auto it = responses_.find(call.digest); it != responses_.end()) {
      ++hits_;
      return ResponseCodec<T>::decode(it->second);
    }
  }
  T value = live();
  ++inner_calls_;
  std::unique_lock lock(mu_);
  ++per_kind_[call.kind];
  responses_.emplace(call.digest, ResponseCodec<T>::encode(value));
  return value;
}

int CachingOracle::inner_calls(CallKind kind) const {
  std::shared_lock lock(mu_);
  auto it = per_kind_.find(kind);
  return it == per_kind_.end() ? 0 : it->second;
}

GeoContext CachingOracle::parse(const RawQuery& query) {
  return through<GeoContext>(parse_call(query),
                             [&] { return inner_.parse(query); });
}

QAVerdict CachingOracle::qa_verify(const RegionView& view, const GeoContext& ctx) {
  return through<QAVerdict>(qa_verify_call(view, ctx),
                            [&] { return inner_.qa_verify(view, ctx); });
}

std::optional<PixelRect> CachingOracle::predict_box(const RegionView& view,
                                                    const std::string& object) {
  return through<std::optional<PixelRect>>(
      predict_box_call(view, object),
      [&] { return inner_.predict_box(view, object); });
}

GridCell CachingOracle::choose_cell(const RegionView& view, const GeoContext& ctx) {
  return through<GridCell>(choose_cell_call(view, ctx),
                           [&] { return inner_.choose_cell(view, ctx); });
}

PixelRect CachingOracle::conditional_ground(const RegionView& cue,
                                            const RawQuery& query) {
  return through<PixelRect>(conditional_ground_call(cue, query),
                            [&] { return inner_.conditional_ground(cue, query); });
}

}  // namespace geosearch
