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

#include "geosearch/export.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "geosearch/error.h"
#include "geosearch/prompts.h"
#include "geosearch/raster.h"

namespace geosearch {

namespace {

using nlohmann::json;

std::string box_text(const PixelRect& r) {
  return std::to_string(r.x1) + ", " + std::to_string(r.y1) + ", " + std::to_string(r.x2) +
         ", " + std::to_string(r.y2);
}

json extent_json(const ImageExtent& e) { return json::array({e.width, e.height}); }

ImageExtent extent_from(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorKind::kInvalidArgument, "image_size must be [width, height]");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::kInvalidArgument, std::string("export record lacks '") + key + "'");
  }
  return j.at(key);
}

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Random window of the given size containing `inner`, inside the image.
PixelRect window_around(std::mt19937_64& rng, const PixelRect& inner, int w, int h,
                        const ImageExtent& extent) {
  w = std::clamp(w, inner.width(), extent.width);
  h = std::clamp(h, inner.height(), extent.height);
  const int x = uniform(rng, std::max(0, inner.x2 - w), std::min(inner.x1, extent.width - w));
  const int y = uniform(rng, std::max(0, inner.y2 - h), std::min(inner.y1, extent.height - h));
  return {x, y, x + w, y + h};
}

// GT scaled about a center shifted by up to jitter_frac of the GT size.
PixelRect jittered_scale(std::mt19937_64& rng, const PixelRect& gt, double scale,
                         double jitter_frac, const ImageExtent& extent) {
  const int dx = static_cast<int>(std::lround(uniform_real(rng, -jitter_frac, jitter_frac) *
                                              gt.width()));
  const int dy = static_cast<int>(std::lround(uniform_real(rng, -jitter_frac, jitter_frac) *
                                              gt.height()));
  const PixelRect scaled = scale_about_center(gt.translated(dx, dy), scale,
                                              ImageExtent{1 << 30, 1 << 30});
  // Scaling happened on the unclipped plane; clip to the image and make sure
  // the GT survived rounding.
  PixelRect r = clip(scaled, extent);
  r.x1 = std::min(r.x1, gt.x1);
  r.y1 = std::min(r.y1, gt.y1);
  r.x2 = std::max(r.x2, gt.x2);
  r.y2 = std::max(r.y2, gt.y2);
  return r;
}

std::string qa_prompt(const ImageExtent& size, const PixelRect& region, const GeoContext& ctx) {
  return prompts::render("qa_verify", {{"global_width", std::to_string(size.width)},
                                       {"global_height", std::to_string(size.height)},
                                       {"region", box_text(region)},
                                       {"object", ctx.object},
                                       {"position", ctx.position.value_or("null")},
                                       {"relations", json(ctx.relations).dump()}});
}

QAVerdict uniform_verdict(const GeoContext& ctx, bool answer) {
  QAVerdict v;
  v.object_present = answer;
  if (ctx.position) v.position_match = answer;
  v.relation_match.assign(ctx.relations.size(), answer);
  return v;
}

}  // namespace

std::string_view record_kind(const ExportRecord& r) {
  static constexpr std::string_view kNames[] = {"qa", "iou", "zoom_in", "cond_ground"};
  return kNames[r.index()];
}

json record_to_json(const ExportRecord& r) {
  json out{{"kind", record_kind(r)}};
  if (const auto* q = std::get_if<QaExample>(&r)) {
    out["inputs"] = {{"image", q->image},      {"image_size", extent_json(q->image_size)},
                     {"region", q->region},    {"context", q->context},
                     {"negative", q->negative}, {"prompt", q->prompt}};
    out["label"] = q->label;
  } else if (const auto* i = std::get_if<IouExample>(&r)) {
    out["inputs"] = {{"image", i->image},   {"image_size", extent_json(i->image_size)},
                     {"region", i->region}, {"object", i->object},
                     {"prompt", i->prompt}};
    out["label"] = {{"box", i->label}};
  } else if (const auto* z = std::get_if<ZoomInExample>(&r)) {
    out["inputs"] = {{"image", z->image},   {"image_size", extent_json(z->image_size)},
                     {"region", z->region}, {"context", z->context},
                     {"prompt", z->prompt}};
    out["label"] = {{"cell", z->label}};
  } else {
    const auto& c = std::get<CondGroundExample>(r);
    out["inputs"] = {{"image", c.image}, {"image_size", extent_json(c.image_size)},
                     {"cue", c.cue},     {"query", c.query},
                     {"prompt", c.prompt}};
    out["label"] = {{"box", c.label}};
  }
  return out;
}

ExportRecord record_from_json(const json& j) {
  try {
    const std::string kind = field(j, "kind").get<std::string>();
    const json& in = field(j, "inputs");
    const json& label = field(j, "label");
    if (kind == "qa") {
      QaExample q;
      q.image = field(in, "image").get<std::string>();
      q.image_size = extent_from(field(in, "image_size"));
      q.region = field(in, "region").get<PixelRect>();
      q.context = field(in, "context").get<GeoContext>();
      q.negative = field(in, "negative").get<bool>();
      q.prompt = field(in, "prompt").get<std::string>();
      q.label = label.get<QAVerdict>();
      check_verdict_shape(q.label, q.context);
      return q;
    }
    if (kind == "iou") {
      IouExample i;
      i.image = field(in, "image").get<std::string>();
      i.image_size = extent_from(field(in, "image_size"));
      i.region = field(in, "region").get<PixelRect>();
      i.object = field(in, "object").get<std::string>();
      i.prompt = field(in, "prompt").get<std::string>();
      i.label = field(label, "box").get<PixelRect>();
      return i;
    }
    if (kind == "zoom_in") {
      ZoomInExample z;
      z.image = field(in, "image").get<std::string>();
      z.image_size = extent_from(field(in, "image_size"));
      z.region = field(in, "region").get<PixelRect>();
      z.context = field(in, "context").get<GeoContext>();
      z.prompt = field(in, "prompt").get<std::string>();
      z.label = GridCell(field(label, "cell").get<int>()).index();
      return z;
    }
    if (kind == "cond_ground") {
      CondGroundExample c;
      c.image = field(in, "image").get<std::string>();
      c.image_size = extent_from(field(in, "image_size"));
      c.cue = field(in, "cue").get<PixelRect>();
      c.query = field(in, "query").get<std::string>();
      c.prompt = field(in, "prompt").get<std::string>();
      c.label = field(label, "box").get<PixelRect>();
      return c;
    }
    throw Error(ErrorKind::kInvalidArgument, "unknown export record kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidArgument, std::string("bad export record: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kInvalidArgument) throw;
    throw Error(ErrorKind::kInvalidArgument, std::string("bad export record: ") + e.what());
  }
}

ExportResult export_training_examples(const Manifest& manifest, const ExportOptions& options) {
  const ExportCounts& n = options.counts;
  if (n.qa < 0 || n.iou < 0 || n.zoom_in < 0 || n.cond_ground < 0) {
    throw Error(ErrorKind::kConfig, "export counts must be >= 0");
  }
  if (!(options.jitter_frac >= 0.0 && options.jitter_frac < 0.5)) {
    throw Error(ErrorKind::kConfig, "jitter fraction must lie in [0, 0.5)");
  }
  ExportResult result;
  for (std::size_t idx = 0; idx < manifest.records.size(); ++idx) {
    const ManifestRecord& rec = manifest.records[idx];
    ImageExtent size;
    try {
      size = probe_extent(manifest.resolve(rec));
    } catch (const Error& e) {
      throw Error(ErrorKind::kManifest, "record " + std::to_string(idx) + ": " + e.what());
    }
    const PixelRect& gt = rec.gt_box;
    const RawQuery query(rec.query_text);
    const GeoContext ctx = rec.structured ? *rec.structured : heuristic_structure(query);
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                      static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(idx)};
    std::mt19937_64 rng(seq);

    for (int k = 0; k < n.qa; ++k) {
      const bool negative = k % 2 == 1;
      const int w = static_cast<int>(std::lround(gt.width() * uniform_real(rng, 1.5, 4.0)));
      const int h = static_cast<int>(std::lround(gt.height() * uniform_real(rng, 1.5, 4.0)));
      std::optional<PixelRect> region;
      if (!negative) {
        region = window_around(rng, gt, w, h, size);
      } else {
        const int cw = std::clamp(w, 1, size.width);
        const int ch = std::clamp(h, 1, size.height);
        for (int t = 0; t < options.max_negative_attempts && !region; ++t) {
          const int x = uniform(rng, 0, size.width - cw);
          const int y = uniform(rng, 0, size.height - ch);
          const PixelRect cand{x, y, x + cw, y + ch};
          if (intersection_area(cand, gt) == 0) region = cand;
        }
        if (!region) {
          ++result.skipped;
          continue;
        }
      }
      result.records.push_back(QaExample{rec.image_path, size, *region, ctx, negative,
                                         qa_prompt(size, *region, ctx),
                                         uniform_verdict(ctx, !negative)});
    }

    for (int k = 0; k < n.iou; ++k) {
      const PixelRect region =
          jittered_scale(rng, gt, uniform_real(rng, 1.5, 3.0), options.jitter_frac, size);
      const std::string prompt =
          prompts::render("predict_box", {{"width", std::to_string(region.width())},
                                          {"height", std::to_string(region.height())},
                                          {"object", ctx.object}});
      result.records.push_back(IouExample{rec.image_path, size, region, ctx.object, prompt,
                                          gt.translated(-region.x1, -region.y1)});
    }

    for (int k = 0; k < n.zoom_in; ++k) {
      const int lo = std::min(std::max(3 * gt.max_side(), 64), std::min(size.width, size.height));
      const int side = uniform(rng, lo, std::max(size.width, size.height));
      const PixelRect region = window_around(rng, gt, side, side, size);
      const std::int64_t cx = static_cast<std::int64_t>(gt.x1) + gt.x2;
      const std::int64_t cy = static_cast<std::int64_t>(gt.y1) + gt.y2;
      int cell = 0;
      for (const int c : kAllCells) {
        if (grid_cell(region, GridCell(c)).contains_doubled_point(cx, cy)) {
          cell = c;
          break;
        }
      }
      const std::string prompt =
          prompts::render("choose_cell", {{"width", std::to_string(region.width())},
                                          {"height", std::to_string(region.height())},
                                          {"object", ctx.object},
                                          {"position", ctx.position.value_or("none")},
                                          {"relations", json(ctx.relations).dump()}});
      result.records.push_back(ZoomInExample{rec.image_path, size, region, ctx, prompt, cell});
    }

    for (int k = 0; k < n.cond_ground; ++k) {
      const PixelRect cue = jittered_scale(rng, gt, 2.0, options.jitter_frac, size);
      const std::string prompt =
          prompts::render("conditional_ground", {{"width", std::to_string(size.width)},
                                                 {"height", std::to_string(size.height)},
                                                 {"cue", box_text(cue)},
                                                 {"query", query.text()}});
      result.records.push_back(
          CondGroundExample{rec.image_path, size, cue, query.text(), prompt, gt});
    }
  }
  return result;
}

void write_export(const std::vector<ExportRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace geosearch
