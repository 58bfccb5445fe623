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
#include <optional>
#include <string>
#include <vector>

#include "geosearch/geometry.h"
#include "geosearch/query.h"
#include "json.hpp"

namespace geosearch {

// One benchmark sample. image_path is stored as written in the manifest;
// relative paths resolve against the manifest's directory.
struct ManifestRecord {
  std::string image_path;
  std::string query_text;
  std::optional<GeoContext> structured;
  PixelRect gt_box;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

// {"image_path": str, "query_text": str, "structured": object|null,
//  "gt_box": [x1, y1, x2, y2]}
void to_json(nlohmann::json& j, const ManifestRecord& r);
void from_json(const nlohmann::json& j, ManifestRecord& r);

struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ManifestRecord> records;

  std::filesystem::path resolve(const ManifestRecord& r) const;
};

// Parses a JSON Lines manifest and checks each gt_box against its image's
// extent. Images that cannot be read are kept; they fail at run time.
// Throws ManifestError on malformed lines or boxes outside the image.
Manifest load_manifest(const std::filesystem::path& path);

void save_manifest(const std::vector<ManifestRecord>& records,
                   const std::filesystem::path& path);

}  // namespace geosearch
