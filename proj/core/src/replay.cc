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

#include "geosearch/replay.h"

#include "geosearch/error.h"

namespace geosearch {

FixtureStore::FixtureStore(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) load_file(f);
}

void FixtureStore::load_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::kIo, "cannot open fixtures " + file.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      insert(j.at("digest").get<std::string>(),
             call_kind_from_string(j.at("kind").get<std::string>()),
             j.at("response"));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kDecode, file.string() + ":" +
                                          std::to_string(lineno) + ": " + e.what());
    }
  }
}

void FixtureStore::insert(const std::string& digest, CallKind /*kind*/,
                          nlohmann::json response) {
  std::unique_lock lock(mu_);
  entries_.emplace(digest, std::move(response));
}

std::optional<nlohmann::json> FixtureStore::lookup(const std::string& digest) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(digest);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::size_t FixtureStore::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

FixtureWriter::FixtureWriter(const std::filesystem::path& file)
    : out_(file, std::ios::app) {
  if (!out_) throw Error(ErrorKind::kIo, "cannot open " + file.string());
}

void FixtureWriter::append(const OracleCall& call, const nlohmann::json& response) {
  std::lock_guard lock(mu_);
  if (!written_.insert(call.digest).second) return;
  const nlohmann::json line{{"digest", call.digest},
                            {"kind", to_string(call.kind)},
                            {"response", response}};
  out_ << line.dump() << '\n';
  out_.flush();
}

// ---- replay ------------------------------------------------------------------

template <typename T>
T ReplayOracle::replay(const OracleCall& call) const {
  auto response = store_.lookup(call.digest);
  if (!response) {
    throw Error(ErrorKind::kFixtureMiss, "no fixture for " +
                                             std::string(to_string(call.kind)) +
                                             " call " + call.digest);
  }
  return ResponseCodec<T>::decode(*response);
}

GeoContext ReplayOracle::parse(const RawQuery& query) {
  return replay<GeoContext>(parse_call(query));
}

QAVerdict ReplayOracle::qa_verify(const RegionView& view, const GeoContext& ctx) {
  return replay<QAVerdict>(qa_verify_call(view, ctx));
}

std::optional<PixelRect> ReplayOracle::predict_box(const RegionView& view,
                                                   const std::string& object) {
  return replay<std::optional<PixelRect>>(predict_box_call(view, object));
}

GridCell ReplayOracle::choose_cell(const RegionView& view, const GeoContext& ctx) {
  return replay<GridCell>(choose_cell_call(view, ctx));
}

PixelRect ReplayOracle::conditional_ground(const RegionView& cue,
                                           const RawQuery& query) {
  return replay<PixelRect>(conditional_ground_call(cue, query));
}

// ---- recording ---------------------------------------------------------------

template <typename T, typename Fn>
T RecordingOracle::record(const OracleCall& call, Fn&& live) {
  T value = live();
  writer_.append(call, ResponseCodec<T>::encode(value));
  return value;
}

GeoContext RecordingOracle::parse(const RawQuery& query) {
  return record<GeoContext>(parse_call(query), [&] { return live_.parse(query); });
}

QAVerdict RecordingOracle::qa_verify(const RegionView& view, const GeoContext& ctx) {
  return record<QAVerdict>(qa_verify_call(view, ctx),
                           [&] { return live_.qa_verify(view, ctx); });
}

std::optional<PixelRect> RecordingOracle::predict_box(const RegionView& view,
                                                      const std::string& object) {
  return record<std::optional<PixelRect>>(
      predict_box_call(view, object), [&] { return live_.predict_box(view, object); });
}

GridCell RecordingOracle::choose_cell(const RegionView& view, const GeoContext& ctx) {
  return record<GridCell>(choose_cell_call(view, ctx),
                          [&] { return live_.choose_cell(view, ctx); });
}

PixelRect RecordingOracle::conditional_ground(const RegionView& cue,
                                              const RawQuery& query) {
  return record<PixelRect>(conditional_ground_call(cue, query),
                           [&] { return live_.conditional_ground(cue, query); });
}

}  // namespace geosearch
