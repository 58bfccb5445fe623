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

#include <atomic>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geosearch/geometry.h"
#include "geosearch/query.h"
#include "geosearch/raster.h"
#include "json.hpp"

namespace geosearch {

enum class CallKind {
  kParse,
  kQaVerify,
  kPredictBox,
  kChooseCell,
  kConditionalGround,
};

std::string_view to_string(CallKind kind);
CallKind call_kind_from_string(std::string_view name);

// A region of a global image, by reference. Oracles that need pixels crop
// on demand; the global raster digest plus the coordinates identify the
// region content.
struct RegionView {
  const Raster& image;
  PixelRect region;
};

// One boolean per verifiable element of a GeoContext.
struct QAVerdict {
  bool object_present = false;
  std::optional<bool> position_match;
  std::vector<bool> relation_match;

  friend bool operator==(const QAVerdict&, const QAVerdict&) = default;
};

void to_json(nlohmann::json& j, const QAVerdict& v);
void from_json(const nlohmann::json& j, QAVerdict& v);

// Throws MalformedResponse unless the verdict's shape matches the context.
void check_verdict_shape(const QAVerdict& v, const GeoContext& ctx);

// Stable key of one oracle request. Digests depend only on the call kind,
// image content digests, region coordinates and query text.
struct OracleCall {
  CallKind kind;
  std::string digest;
};

OracleCall parse_call(const RawQuery& query);
OracleCall qa_verify_call(const RegionView& view, const GeoContext& ctx);
OracleCall predict_box_call(const RegionView& view, const std::string& object);
OracleCall choose_cell_call(const RegionView& view, const GeoContext& ctx);
OracleCall conditional_ground_call(const RegionView& cue, const RawQuery& query);

// The multimodal model behind the search: query structuring, semantic
// verification, box prediction, zoom-in guidance and conditional grounding.
// Implementations must accept concurrent calls.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual GeoContext parse(const RawQuery& query) = 0;

  virtual QAVerdict qa_verify(const RegionView& view, const GeoContext& ctx) = 0;

  // Box of the main object in region-local coordinates, or nullopt when the
  // object is absent from the region.
  virtual std::optional<PixelRect> predict_box(const RegionView& view,
                                               const std::string& object) = 0;

  virtual GridCell choose_cell(const RegionView& view, const GeoContext& ctx) = 0;

  // Target box in global coordinates, conditioned on the cue region.
  virtual PixelRect conditional_ground(const RegionView& cue,
                                       const RawQuery& query) = 0;
};

// JSON encoding of each capability's response, shared by the cache and the
// record/replay fixtures.
template <typename T>
struct ResponseCodec;

template <>
struct ResponseCodec<GeoContext> {
  static nlohmann::json encode(const GeoContext& v);
  static GeoContext decode(const nlohmann::json& j);
};
template <>
struct ResponseCodec<QAVerdict> {
  static nlohmann::json encode(const QAVerdict& v);
  static QAVerdict decode(const nlohmann::json& j);
};
template <>
struct ResponseCodec<std::optional<PixelRect>> {
  static nlohmann::json encode(const std::optional<PixelRect>& v);
  static std::optional<PixelRect> decode(const nlohmann::json& j);
};
template <>
struct ResponseCodec<PixelRect> {
  static nlohmann::json encode(const PixelRect& v);
  static PixelRect decode(const nlohmann::json& j);
};
template <>
struct ResponseCodec<GridCell> {
  static nlohmann::json encode(const GridCell& v);
  static GridCell decode(const nlohmann::json& j);
};

// Memoizes responses by call digest so revisited regions never re-pay an
// oracle call. Concurrent readers, serialized inserts.
class CachingOracle final : public Oracle {
 public:
  explicit CachingOracle(Oracle& inner) : inner_(inner) {}

  GeoContext parse(const RawQuery& query) override;
  QAVerdict qa_verify(const RegionView& view, const GeoContext& ctx) override;
  std::optional<PixelRect> predict_box(const RegionView& view,
                                       const std::string& object) override;
  GridCell choose_cell(const RegionView& view, const GeoContext& ctx) override;
  PixelRect conditional_ground(const RegionView& cue,
                               const RawQuery& query) override;

  // Calls forwarded to the wrapped oracle (cache misses).
  int inner_calls() const noexcept { return inner_calls_.load(); }
  int inner_calls(CallKind kind) const;
  int hits() const noexcept { return hits_.load(); }

 private:
  template <typename T, typename Fn>
  T through(const OracleCall& call, Fn&& live);

  Oracle& inner_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, nlohmann::json> responses_;
  std::map<CallKind, int> per_kind_;
  std::atomic<int> inner_calls_{0};
  std::atomic<int> hits_{0};
};

}  // namespace geosearch
