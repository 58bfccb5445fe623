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

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "geosearch/oracle.h"
#include "json.hpp"

namespace geosearch {

// digest -> response map loaded from JSON Lines fixtures, one object per
// line: {"digest": hex, "kind": str, "response": object}. Loading several
// files yields their union.
class FixtureStore {
 public:
  FixtureStore() = default;
  explicit FixtureStore(const std::vector<std::filesystem::path>& files);

  void load_file(const std::filesystem::path& file);
  void insert(const std::string& digest, CallKind kind, nlohmann::json response);
  std::optional<nlohmann::json> lookup(const std::string& digest) const;
  std::size_t size() const;

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, nlohmann::json> entries_;
};

// Appends fixture lines. Each digest is written at most once.
class FixtureWriter {
 public:
  explicit FixtureWriter(const std::filesystem::path& file);

  void append(const OracleCall& call, const nlohmann::json& response);

 private:
  std::mutex mu_;
  std::ofstream out_;
  std::unordered_set<std::string> written_;
};

// Serves recorded responses; throws FixtureMiss for unknown digests.
class ReplayOracle final : public Oracle {
 public:
  explicit ReplayOracle(const FixtureStore& store) : store_(store) {}

  GeoContext parse(const RawQuery& query) override;
  QAVerdict qa_verify(const RegionView& view, const GeoContext& ctx) override;
  std::optional<PixelRect> predict_box(const RegionView& view,
                                       const std::string& object) override;
  GridCell choose_cell(const RegionView& view, const GeoContext& ctx) override;
  PixelRect conditional_ground(const RegionView& cue,
                               const RawQuery& query) override;

 private:
  template <typename T>
  T replay(const OracleCall& call) const;

  const FixtureStore& store_;
};

// Forwards to a live oracle and records every response.
class RecordingOracle final : public Oracle {
 public:
  RecordingOracle(Oracle& live, FixtureWriter& writer)
      : live_(live), writer_(writer) {}

  GeoContext parse(const RawQuery& query) override;
  QAVerdict qa_verify(const RegionView& view, const GeoContext& ctx) override;
  std::optional<PixelRect> predict_box(const RegionView& view,
                                       const std::string& object) override;
  GridCell choose_cell(const RegionView& view, const GeoContext& ctx) override;
  PixelRect conditional_ground(const RegionView& cue,
                               const RawQuery& query) override;

 private:
  template <typename T, typename Fn>
  T record(const OracleCall& call, Fn&& live);

  Oracle& live_;
  FixtureWriter& writer_;
};

}  // namespace geosearch
