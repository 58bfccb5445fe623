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

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "geosearch/geometry.h"
#include "geosearch/manifest.h"
#include "geosearch/oracle.h"
#include "geosearch/query.h"
#include "json.hpp"

namespace geosearch {

// Region verification: a crop plus one question per context element.
// Positive crops contain the GT box (all answers yes); negative crops do not
// touch it (all answers no).
struct QaExample {
  std::string image;
  ImageExtent image_size;
  PixelRect region;
  GeoContext context;
  bool negative = false;
  std::string prompt;
  QAVerdict label;
  friend bool operator==(const QaExample&, const QaExample&) = default;
};

// Object localization inside a jittered crop around the GT box.
struct IouExample {
  std::string image;
  ImageExtent image_size;
  PixelRect region;
  std::string object;
  std::string prompt;
  PixelRect label;  // crop-local
  friend bool operator==(const IouExample&, const IouExample&) = default;
};

// Zoom-in guidance: the cell of a GT-containing region that holds the GT center.
struct ZoomInExample {
  std::string image;
  ImageExtent image_size;
  PixelRect region;
  GeoContext context;
  std::string prompt;
  int label = 1;
  friend bool operator==(const ZoomInExample&, const ZoomInExample&) = default;
};

// Grounding from the global image and a GT-containing cue crop.
struct CondGroundExample {
  std::string image;
  ImageExtent image_size;
  PixelRect cue;
  std::string query;
  std::string prompt;
  PixelRect label;  // global
  friend bool operator==(const CondGroundExample&, const CondGroundExample&) = default;
};

using ExportRecord = std::variant<QaExample, IouExample, ZoomInExample, CondGroundExample>;

std::string_view record_kind(const ExportRecord& r);

// {"kind": "qa"|"iou"|"zoom_in"|"cond_ground", "inputs": {...}, "label": ...}
nlohmann::json record_to_json(const ExportRecord& r);
// Strict: unknown kinds, missing keys and wrongly typed values throw
// InvalidArgument.
ExportRecord record_from_json(const nlohmann::json& j);

struct ExportCounts {
  int qa = 2;  // alternating positive, negative
  int iou = 1;
  int zoom_in = 1;
  int cond_ground = 1;
};

struct ExportOptions {
  ExportCounts counts;
  std::uint64_t seed = 0;
  double jitter_frac = 0.25;  // crop center jitter, fraction of GT size
  int max_negative_attempts = 100;
};

struct ExportResult {
  std::vector<ExportRecord> records;
  int skipped = 0;  // negatives dropped after exhausting attempts
};

ExportResult export_training_examples(const Manifest& manifest, const ExportOptions& options);

void write_export(const std::vector<ExportRecord>& records, const std::filesystem::path& path);

}  // namespace geosearch
