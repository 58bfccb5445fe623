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

#include <functional>
#include <string>
#include <vector>

#include "geosearch/oracle.h"
#include "geosearch/raster.h"
#include "json.hpp"

namespace geosearch {

struct RemoteOracleConfig {
  // http(s)://host[:port]/path
  std::string endpoint;
  std::string model;
  double timeout_seconds = 60.0;
  // Extra attempts after a transport failure or non-2xx status.
  int max_retries = 2;
  int max_side = kDefaultOracleMaxSide;
  // Bearer token source. Credentials are never taken from flags.
  std::string token_env = "GEOVIS_API_TOKEN";
};

void to_json(nlohmann::json& j, const RemoteOracleConfig& c);
void from_json(const nlohmann::json& j, RemoteOracleConfig& c);

// Oracle backed by a multimodal chat model over HTTP.
//
// Request body: {"model": str, "messages": [{"role", "content"}],
//                "images": [{"media_type", "data": base64}]}
// The reply's text (either the body itself, "content", "message.content" or
// "choices[0].message.content") must be a single JSON object. A reply that
// does not parse or fails validation earns one reformat prompt; a second
// failure is MalformedResponse. Images are downscaled per resize_for_oracle
// and boxes are exchanged in the pixel space of the images as sent.
class RemoteOracle final : public Oracle {
 public:
  explicit RemoteOracle(RemoteOracleConfig config);

  GeoContext parse(const RawQuery& query) override;
  QAVerdict qa_verify(const RegionView& view, const GeoContext& ctx) override;
  std::optional<PixelRect> predict_box(const RegionView& view,
                                       const std::string& object) override;
  GridCell choose_cell(const RegionView& view, const GeoContext& ctx) override;
  PixelRect conditional_ground(const RegionView& cue,
                               const RawQuery& query) override;

  struct Attachment {
    std::string media_type;
    std::string data;
  };

 private:
  template <typename T>
  T ask(const std::string& prompt, const std::vector<Attachment>& images,
        const std::function<T(const nlohmann::json&)>& decode);

  std::string post(const nlohmann::json& body);

  RemoteOracleConfig config_;
  std::string base_url_;
  std::string path_;
};

}  // namespace geosearch
