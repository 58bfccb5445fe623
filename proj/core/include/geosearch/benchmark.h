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

#include <optional>
#include <string>
#include <vector>

#include "geosearch/grounding.h"
#include "geosearch/manifest.h"
#include "geosearch/oracle.h"
#include "geosearch/search.h"
#include "json.hpp"

namespace geosearch {

struct SampleResult {
  int index = 0;
  std::string image_path;
  std::string query;
  double iou = 0.0;
  std::optional<PixelRect> predicted;
  std::optional<PixelRect> best_region;
  double elapsed_ms = 0.0;
  int oracle_calls = 0;
  std::optional<std::string> error;  // set for failed samples (IoU 0)
};

struct Aggregates {
  double pr_at_05 = 0.0;
  double pr_at_07 = 0.0;
  double mean_iou = 0.0;
  int count = 0;  // M
  int failures = 0;
};

struct EvalReport {
  nlohmann::json config;  // the run configuration, verbatim
  std::string mode;
  std::vector<SampleResult> samples;
  Aggregates aggregates;
};

// Pr@0.5, Pr@0.7 and meanIoU over the sample IoUs, failures included.
Aggregates aggregate(const std::vector<SampleResult>& samples);

nlohmann::json report_to_json(const EvalReport& report, bool include_timing);
EvalReport report_from_json(const nlohmann::json& j);

// One header row plus one summary row.
std::string report_summary_csv(const EvalReport& report);

// "Pr@0.5=0.830 Pr@0.7=0.610 meanIoU=0.702 M=200"
std::string summary_line(const Aggregates& a);

struct BenchmarkOptions {
  GroundingMode mode = GroundingMode::kSearch;
  int workers = 1;
};

// Runs the pipeline on every record with a pool of `workers` threads sharing
// `oracle`. Sample order follows the manifest; a failing sample scores IoU 0
// and never stops the run.
EvalReport run_benchmark(const Manifest& manifest, const SearchConfig& config,
                         Oracle& oracle, const BenchmarkOptions& options);

struct AlphaRow {
  double alpha = 0.0;
  double pr_at_05 = 0.0;
  double mean_iou = 0.0;
  double pr_change_pct = 0.0;    // 100 * (value / max over sweep - 1)
  double miou_change_pct = 0.0;
};

std::vector<AlphaRow> ablate_alpha(const Manifest& manifest, const SearchConfig& config,
                                   Oracle& oracle, const std::vector<double>& alphas,
                                   const BenchmarkOptions& options);
std::string alpha_table_csv(const std::vector<AlphaRow>& rows);

struct AtomicRow {
  std::string name;
  SearchConfig config;
  double pr_at_05 = 0.0;
  double pr_at_07 = 0.0;
  double mean_iou = 0.0;
};

// baseline (random cell order, constant reward), +oracle cell order,
// +QA reward only, +IoU reward only, full.
std::vector<std::pair<std::string, SearchConfig>> atomic_configs(const SearchConfig& base);

std::vector<AtomicRow> ablate_atomic(const Manifest& manifest, const SearchConfig& config,
                                     Oracle& oracle, const BenchmarkOptions& options);
std::string atomic_table_csv(const std::vector<AtomicRow>& rows);

}  // namespace geosearch
