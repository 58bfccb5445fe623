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

#include "geosearch/manifest.h"

#include <fstream>

#include "geosearch/error.h"
#include "geosearch/raster.h"

namespace geosearch {

void to_json(nlohmann::json& j, const ManifestRecord& r) {
  j = nlohmann::json{{"image_path", r.image_path},
                     {"query_text", r.query_text},
                     {"structured", r.structured ? nlohmann::json(*r.structured)
                                                 : nlohmann::json(nullptr)},
                     {"gt_box", r.gt_box}};
}

void from_json(const nlohmann::json& j, ManifestRecord& r) {
  r.image_path = j.at("image_path").get<std::string>();
  r.query_text = j.at("query_text").get<std::string>();
  r.structured.reset();
  if (j.contains("structured") && !j["structured"].is_null()) {
    r.structured = j["structured"].get<GeoContext>();
  }
  r.gt_box = j.at("gt_box").get<PixelRect>();
}

std::filesystem::path Manifest::resolve(const ManifestRecord& r) const {
  const std::filesystem::path p(r.image_path);
  return p.is_absolute() ? p : base_dir / p;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open manifest " + path.string());
  Manifest m;
  m.base_dir = path.parent_path();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
    ManifestRecord rec;
    try {
      rec = nlohmann::json::parse(line).get<ManifestRecord>();
      (void)RawQuery(rec.query_text);
      if (rec.structured) rec.structured->validate();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kManifest, where + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::kManifest, where + e.what());
    }
    if (!rec.gt_box.valid()) {
      throw Error(ErrorKind::kManifest, where + "gt_box " + to_string(rec.gt_box) + " is empty");
    }
    std::optional<ImageExtent> extent;
    try {
      extent = probe_extent(m.resolve(rec));
    } catch (const Error&) {
      // Unreadable image: scored as a failure by the harness.
    }
    if (extent && !extent->contains(rec.gt_box)) {
      throw Error(ErrorKind::kManifest, where + "gt_box " + to_string(rec.gt_box) +
                                            " exceeds the image extent " +
                                            std::to_string(extent->width) + "x" +
                                            std::to_string(extent->height));
    }
    m.records.push_back(std::move(rec));
  }
  return m;
}

void save_manifest(const std::vector<ManifestRecord>& records,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write manifest " + path.string());
  for (const auto& r : records) out << nlohmann::json(r).dump() << '\n';
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace geosearch
