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

#include "geosearch/benchmark.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <thread>

#include "geosearch/error.h"
#include "geosearch/metrics.h"
#include "geosearch/raster.h"

namespace geosearch {

namespace {

using nlohmann::json;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json opt_box(const std::optional<PixelRect>& b) { return b ? json(*b) : json(nullptr); }

std::optional<PixelRect> box_or_null(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<PixelRect>();
}

SampleResult run_one(const Manifest& manifest, int index, const SearchConfig& config,
                     Oracle& oracle, GroundingMode mode) {
  const ManifestRecord& rec = manifest.records[static_cast<std::size_t>(index)];
  SampleResult s;
  s.index = index;
  s.image_path = rec.image_path;
  s.query = rec.query_text;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Raster image = load_raster(manifest.resolve(rec));
    const PipelineInput input{image, RawQuery(rec.query_text), rec.structured, rec.gt_box};
    const PipelineResult r = run_pipeline(input, config, oracle, mode);
    s.predicted = r.predicted;
    s.best_region = r.best_region;
    s.iou = iou(r.predicted, rec.gt_box);
    s.oracle_calls = r.oracle_calls;
  } catch (const std::exception& e) {
    s.iou = 0.0;
    s.error = e.what();
  }
  s.elapsed_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
  return s;
}

}  // namespace

Aggregates aggregate(const std::vector<SampleResult>& samples) {
  Aggregates a;
  a.count = static_cast<int>(samples.size());
  if (samples.empty()) return a;
  std::vector<double> ious;
  ious.reserve(samples.size());
  for (const auto& s : samples) {
    ious.push_back(s.iou);
    a.failures += s.error ? 1 : 0;
  }
  a.pr_at_05 = precision_at(ious, 0.5);
  a.pr_at_07 = precision_at(ious, 0.7);
  a.mean_iou = mean_iou(ious);
  return a;
}

json report_to_json(const EvalReport& report, bool include_timing) {
  json samples = json::array();
  for (const auto& s : report.samples) {
    json row{{"id", s.index},
             {"image_path", s.image_path},
             {"query", s.query},
             {"iou", s.iou},
             {"predicted", opt_box(s.predicted)},
             {"best_region", opt_box(s.best_region)},
             {"oracle_calls", s.oracle_calls},
             {"error", s.error ? json(*s.error) : json(nullptr)}};
    if (include_timing) row["elapsed_ms"] = s.elapsed_ms;
    samples.push_back(std::move(row));
  }
  const Aggregates& a = report.aggregates;
  return json{{"config", report.config},
              {"mode", report.mode},
              {"samples", std::move(samples)},
              {"aggregates",
               {{"pr@0.5", a.pr_at_05},
                {"pr@0.7", a.pr_at_07},
                {"mean_iou", a.mean_iou},
                {"count", a.count},
                {"failures", a.failures}}}};
}

EvalReport report_from_json(const json& j) {
  EvalReport r;
  r.config = j.at("config");
  r.mode = j.at("mode").get<std::string>();
  for (const auto& row : j.at("samples")) {
    SampleResult s;
    s.index = row.at("id").get<int>();
    s.image_path = row.at("image_path").get<std::string>();
    s.query = row.at("query").get<std::string>();
    s.iou = row.at("iou").get<double>();
    s.predicted = box_or_null(row.at("predicted"));
    s.best_region = box_or_null(row.at("best_region"));
    s.oracle_calls = row.at("oracle_calls").get<int>();
    if (!row.at("error").is_null()) s.error = row["error"].get<std::string>();
    s.elapsed_ms = row.value("elapsed_ms", 0.0);
    r.samples.push_back(std::move(s));
  }
  const json& a = j.at("aggregates");
  r.aggregates.pr_at_05 = a.at("pr@0.5").get<double>();
  r.aggregates.pr_at_07 = a.at("pr@0.7").get<double>();
  r.aggregates.mean_iou = a.at("mean_iou").get<double>();
  r.aggregates.count = a.at("count").get<int>();
  r.aggregates.failures = a.at("failures").get<int>();
  return r;
}

std::string report_summary_csv(const EvalReport& report) {
  const Aggregates& a = report.aggregates;
  std::ostringstream out;
  out << "mode,count,failures,pr@0.5,pr@0.7,mean_iou\n"
      << report.mode << ',' << a.count << ',' << a.failures << ',' << fixed(a.pr_at_05, 6)
      << ',' << fixed(a.pr_at_07, 6) << ',' << fixed(a.mean_iou, 6) << '\n';
  return out.str();
}

std::string summary_line(const Aggregates& a) {
  return "Pr@0.5=" + fixed(a.pr_at_05, 3) + " Pr@0.7=" + fixed(a.pr_at_07, 3) +
         " meanIoU=" + fixed(a.mean_iou, 3) + " M=" + std::to_string(a.count);
}

EvalReport run_benchmark(const Manifest& manifest, const SearchConfig& config,
                         Oracle& oracle, const BenchmarkOptions& options) {
  if (options.workers < 1) throw Error(ErrorKind::kConfig, "workers must be >= 1");
  config.validate();
  const int n = static_cast<int>(manifest.records.size());
  std::vector<SampleResult> samples(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      samples[static_cast<std::size_t>(i)] = run_one(manifest, i, config, oracle, options.mode);
    }
  };
  const int threads = std::min(options.workers, std::max(n, 1));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  EvalReport report;
  report.config = json{{"search", config}};
  report.mode = std::string(to_string(options.mode));
  report.aggregates = aggregate(samples);
  report.samples = std::move(samples);
  return report;
}

std::vector<AlphaRow> ablate_alpha(const Manifest& manifest, const SearchConfig& config,
                                   Oracle& oracle, const std::vector<double>& alphas,
                                   const BenchmarkOptions& options) {
  if (alphas.empty()) throw Error(ErrorKind::kEmptyInput, "alpha sweep is empty");
  std::vector<AlphaRow> rows;
  for (const double alpha : alphas) {
    SearchConfig c = config;
    c.alpha = alpha;
    const EvalReport r = run_benchmark(manifest, c, oracle, options);
    rows.push_back({alpha, r.aggregates.pr_at_05, r.aggregates.mean_iou, 0.0, 0.0});
  }
  double max_pr = 0.0;
  double max_miou = 0.0;
  for (const auto& row : rows) {
    max_pr = std::max(max_pr, row.pr_at_05);
    max_miou = std::max(max_miou, row.mean_iou);
  }
  for (auto& row : rows) {
    row.pr_change_pct = max_pr > 0.0 ? 100.0 * (row.pr_at_05 / max_pr - 1.0) : 0.0;
    row.miou_change_pct = max_miou > 0.0 ? 100.0 * (row.mean_iou / max_miou - 1.0) : 0.0;
  }
  return rows;
}

std::string alpha_table_csv(const std::vector<AlphaRow>& rows) {
  std::ostringstream out;
  out << "alpha,pr@0.5,mean_iou,pr@0.5_change_pct,mean_iou_change_pct\n";
  for (const auto& r : rows) {
    out << fixed(r.alpha, 3) << ',' << fixed(r.pr_at_05, 6) << ',' << fixed(r.mean_iou, 6)
        << ',' << fixed(r.pr_change_pct, 3) << ',' << fixed(r.miou_change_pct, 3) << '\n';
  }
  return out.str();
}

std::vector<std::pair<std::string, SearchConfig>> atomic_configs(const SearchConfig& base) {
  auto make = [&](bool order, bool qa, bool iou_term) {
    SearchConfig c = base;
    c.use_oracle_cell_order = order;
    c.use_qa_reward = qa;
    c.use_iou_reward = iou_term;
    return c;
  };
  return {{"baseline", make(false, false, false)},
          {"+cell_order", make(true, false, false)},
          {"+qa_reward", make(true, true, false)},
          {"+iou_reward", make(true, false, true)},
          {"full", make(true, true, true)}};
}

std::vector<AtomicRow> ablate_atomic(const Manifest& manifest, const SearchConfig& config,
                                     Oracle& oracle, const BenchmarkOptions& options) {
  std::vector<AtomicRow> rows;
  for (auto& [name, c] : atomic_configs(config)) {
    const EvalReport r = run_benchmark(manifest, c, oracle, options);
    rows.push_back({name, c, r.aggregates.pr_at_05, r.aggregates.pr_at_07, r.aggregates.mean_iou});
  }
  return rows;
}

std::string atomic_table_csv(const std::vector<AtomicRow>& rows) {
  std::ostringstream out;
  out << "config,cell_order,qa_reward,iou_reward,pr@0.5,pr@0.7,mean_iou\n";
  for (const auto& r : rows) {
    out << r.name << ',' << r.config.use_oracle_cell_order << ',' << r.config.use_qa_reward
        << ',' << r.config.use_iou_reward << ',' << fixed(r.pr_at_05, 6) << ','
        << fixed(r.pr_at_07, 6) << ',' << fixed(r.mean_iou, 6) << '\n';
  }
  return out.str();
}

}  // namespace geosearch
