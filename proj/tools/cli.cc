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

#include "cli.h"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "geosearch/benchmark.h"
#include "geosearch/error.h"
#include "geosearch/export.h"
#include "geosearch/manifest.h"
#include "geosearch/raster.h"
#include "geosearch/replay.h"
#include "geosearch/scene.h"
#include "geosearch/synthetic_data.h"

namespace geosearch::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void to_json(json& j, const RunConfig& c) {
  json oracle{{"kind", c.oracle.kind},
              {"noise", c.oracle.noise},
              {"fixtures", c.oracle.fixtures},
              {"remote", c.oracle.remote}};
  j = json{{"search", c.search}, {"oracle", std::move(oracle)}, {"mode", c.mode}};
}

void from_json(const json& j, RunConfig& c) {
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "config file must hold a JSON object");
  if (j.contains("search")) {
    SearchConfig s = c.search;
    from_json(j.at("search"), s);
    c.search = s;
  }
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    c.oracle.kind = o.value("kind", c.oracle.kind);
    if (o.contains("noise")) from_json(o.at("noise"), c.oracle.noise);
    if (o.contains("fixtures")) c.oracle.fixtures = o.at("fixtures").get<std::vector<std::string>>();
    if (o.contains("record")) c.oracle.record = o.at("record").get<std::string>();
    if (o.contains("remote")) from_json(o.at("remote"), c.oracle.remote);
  }
  c.mode = j.value("mode", c.mode);
}

namespace {

// Flag values; unset flags leave the config file or defaults untouched.
struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::string> oracle;
  std::vector<std::string> fixtures;
  std::optional<std::string> record;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::optional<double> timeout;
  std::optional<int> retries;
  std::optional<int> max_side;
  std::optional<int> simulations;
  std::optional<int> max_depth;
  std::optional<double> alpha;
  std::optional<double> c;
  std::optional<double> lambda;
  std::optional<double> epsilon;
  std::optional<int> min_region_side;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> best_node;
  bool no_zoom_out = false;
  bool random_cell_order = false;
  bool no_qa_reward = false;
  bool no_iou_reward = false;
  std::optional<double> qa_flip;
  std::optional<double> box_jitter;
  std::optional<double> box_jitter_frac;
  std::optional<double> cell_error;
  std::optional<std::string> mode;
};

void add_run_flags(CLI::App* cmd, Overrides& o, bool with_mode) {
  cmd->add_option("--config", o.config_path, "JSON run configuration; flags override it");
  cmd->add_option("--oracle", o.oracle, "Oracle backend")
      ->check(CLI::IsMember({"synthetic", "replay", "remote"}));
  cmd->add_option("--fixtures", o.fixtures, "Fixture JSONL file(s) for --oracle replay")
      ->delimiter(',');
  cmd->add_option("--record", o.record, "Append live oracle responses to this fixture file");
  cmd->add_option("--endpoint", o.endpoint, "Remote oracle URL (token from $GEOVIS_API_TOKEN)");
  cmd->add_option("--model", o.model, "Remote model name");
  cmd->add_option("--timeout", o.timeout, "Remote request timeout in seconds");
  cmd->add_option("--retries", o.retries, "Remote retries after a failed request");
  cmd->add_option("--max-side", o.max_side, "Longest image side sent to a remote oracle");
  cmd->add_option("--simulations", o.simulations, "MCTS simulations per query (default 10)");
  cmd->add_option("--max-depth", o.max_depth, "Maximum search depth (default 5)");
  cmd->add_option("--alpha", o.alpha, "QA weight in the combined reward (default 0.1)");
  cmd->add_option("--c", o.c, "UCT exploration constant (default 1.414)");
  cmd->add_option("--lambda", o.lambda, "Zoom-out scale factor (default 2.0)");
  cmd->add_option("--epsilon", o.epsilon, "UCT denominator guard (default 1e-6)");
  cmd->add_option("--min-region-side", o.min_region_side,
                  "Regions with a shorter side are not expanded (default 64)");
  cmd->add_option("--seed", o.seed, "Seed for synthetic noise and random cell order");
  cmd->add_option("--best-node", o.best_node, "Best-node policy")
      ->check(CLI::IsMember({"max_reward", "mean_value"}));
  cmd->add_flag("--no-zoom-out", o.no_zoom_out, "Disable the zoom-out action");
  cmd->add_flag("--random-cell-order", o.random_cell_order,
                "Expand cells in seeded random order instead of oracle order");
  cmd->add_flag("--no-qa-reward", o.no_qa_reward, "Drop the QA reward term");
  cmd->add_flag("--no-iou-reward", o.no_iou_reward, "Drop the IoU reward term");
  cmd->add_option("--qa-flip", o.qa_flip, "Synthetic oracle: QA answer flip probability");
  cmd->add_option("--box-jitter", o.box_jitter, "Synthetic oracle: box corner sigma in px");
  cmd->add_option("--box-jitter-frac", o.box_jitter_frac,
                  "Synthetic oracle: extra sigma as a fraction of the viewed side");
  cmd->add_option("--cell-error", o.cell_error,
                  "Synthetic oracle: probability of recommending a wrong cell");
  if (with_mode) {
    cmd->add_option("--mode", o.mode, "Grounding mode")
        ->check(CLI::IsMember({"plain", "search", "oracle-region"}));
  }
}

json read_json_file(const std::string& path, ErrorKind kind) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(kind, path + ": " + e.what());
  }
}

RunConfig resolve_config(const Overrides& o) {
  RunConfig c;
  if (o.config_path) {
    try {
      from_json(read_json_file(*o.config_path, ErrorKind::kConfig), c);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kConfig, *o.config_path + ": " + e.what());
    }
  }
  SearchConfig& s = c.search;
  if (o.simulations) s.num_simulations = *o.simulations;
  if (o.max_depth) s.max_depth = *o.max_depth;
  if (o.alpha) s.alpha = *o.alpha;
  if (o.c) s.exploration = *o.c;
  if (o.lambda) s.zoom_out_factor = *o.lambda;
  if (o.epsilon) s.epsilon = *o.epsilon;
  if (o.min_region_side) s.min_region_side = *o.min_region_side;
  if (o.seed) {
    s.seed = *o.seed;
    c.oracle.noise.seed = *o.seed;
  }
  if (o.best_node) {
    s.best_node_policy =
        *o.best_node == "mean_value" ? BestNodePolicy::kMeanValue : BestNodePolicy::kMaxReward;
  }
  if (o.no_zoom_out) s.enable_zoom_out = false;
  if (o.random_cell_order) s.use_oracle_cell_order = false;
  if (o.no_qa_reward) s.use_qa_reward = false;
  if (o.no_iou_reward) s.use_iou_reward = false;
  if (o.oracle) c.oracle.kind = *o.oracle;
  if (!o.fixtures.empty()) c.oracle.fixtures = o.fixtures;
  if (o.record) c.oracle.record = *o.record;
  if (o.endpoint) c.oracle.remote.endpoint = *o.endpoint;
  if (o.model) c.oracle.remote.model = *o.model;
  if (o.timeout) c.oracle.remote.timeout_seconds = *o.timeout;
  if (o.retries) c.oracle.remote.max_retries = *o.retries;
  if (o.max_side) c.oracle.remote.max_side = *o.max_side;
  NoiseConfig& n = c.oracle.noise;
  if (o.qa_flip) n.qa_flip_prob = *o.qa_flip;
  if (o.box_jitter) n.box_jitter_px = *o.box_jitter;
  if (o.box_jitter_frac) n.box_jitter_frac = *o.box_jitter_frac;
  if (o.cell_error) n.cell_error_prob = *o.cell_error;
  if (o.mode) c.mode = *o.mode;

  s.validate();
  n.validate();
  (void)grounding_mode_from_string(c.mode);
  if (c.oracle.kind == "replay" && c.oracle.fixtures.empty()) {
    throw Error(ErrorKind::kConfig, "--oracle replay needs --fixtures");
  }
  if (c.oracle.kind == "remote" && c.oracle.remote.endpoint.empty()) {
    throw Error(ErrorKind::kConfig, "--oracle remote needs --endpoint");
  }
  if (c.oracle.kind != "synthetic" && c.oracle.kind != "replay" && c.oracle.kind != "remote") {
    throw Error(ErrorKind::kConfig, "unknown oracle '" + c.oracle.kind + "'");
  }
  return c;
}

// Owns the oracle chain: backend, optionally wrapped by a recorder.
class OracleStack {
 public:
  explicit OracleStack(const OracleSettings& s) : scenes_(std::make_shared<SceneRegistry>()) {
    if (s.kind == "synthetic") {
      backend_ = std::make_unique<SyntheticOracle>(scenes_, s.noise);
    } else if (s.kind == "replay") {
      store_ = std::make_unique<FixtureStore>();
      for (const auto& f : s.fixtures) store_->load_file(f);
      backend_ = std::make_unique<ReplayOracle>(*store_);
    } else {
      backend_ = std::make_unique<RemoteOracle>(s.remote);
    }
    if (s.record) {
      writer_ = std::make_unique<FixtureWriter>(*s.record);
      recorder_ = std::make_unique<RecordingOracle>(*backend_, *writer_);
    }
  }

  Oracle& oracle() { return recorder_ ? *recorder_ : *backend_; }
  SceneRegistry& scenes() { return *scenes_; }

 private:
  std::shared_ptr<SceneRegistry> scenes_;
  std::unique_ptr<FixtureStore> store_;
  std::unique_ptr<Oracle> backend_;
  std::unique_ptr<FixtureWriter> writer_;
  std::unique_ptr<Oracle> recorder_;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

std::string trace_document(const SearchTrace& trace, const RunConfig& config) {
  json doc = trace;
  doc["run_config"] = config;
  return doc.dump(2) + "\n";
}

// ---- commands ----------------------------------------------------------------

struct SearchArgs {
  std::string image;
  std::string query;
  std::optional<std::string> scene;
  std::optional<std::string> trace_out;
};

int cmd_search(const SearchArgs& a, const RunConfig& config, std::ostream& out) {
  OracleStack stack(config.oracle);
  const Raster image = load_raster(a.image);
  std::optional<PixelRect> gt;
  if (a.scene) {
    SyntheticScene scene = load_scene(*a.scene);
    gt = scene.target().box;
    stack.scenes().add(image.source(), std::move(scene));
  } else if (config.oracle.kind == "synthetic") {
    const fs::path sp = scene_path_for(a.image);
    if (fs::exists(sp)) gt = load_scene(sp).target().box;
  }
  const GroundingMode mode = grounding_mode_from_string(config.mode);
  const PipelineInput input{image, RawQuery(a.query), std::nullopt, gt};
  try {
    const PipelineResult r = run_pipeline(input, config.search, stack.oracle(), mode);
    if (a.trace_out && r.trace) write_text(*a.trace_out, trace_document(*r.trace, config));
    out << to_string(r.predicted) << '\n';
  } catch (const SearchAborted& e) {
    if (a.trace_out) write_text(*a.trace_out, trace_document(e.trace(), config));
    throw;
  }
  return kExitOk;
}

struct EvalArgs {
  std::string manifest;
  int workers = 1;
  std::optional<std::string> report_out;
  bool no_timing = false;
};

int cmd_eval(const EvalArgs& a, const RunConfig& config, std::ostream& out) {
  const Manifest manifest = load_manifest(a.manifest);
  OracleStack stack(config.oracle);
  BenchmarkOptions opts{grounding_mode_from_string(config.mode), a.workers};
  EvalReport report = run_benchmark(manifest, config.search, stack.oracle(), opts);
  report.config = config;
  if (a.report_out) {
    const fs::path json_path(*a.report_out);
    write_text(json_path, report_to_json(report, !a.no_timing).dump(2) + "\n");
    fs::path csv_path = json_path;
    csv_path.replace_extension(".csv");
    write_text(csv_path, report_summary_csv(report));
  }
  out << summary_line(report.aggregates) << '\n';
  return kExitOk;
}

struct AblateArgs {
  std::string manifest;
  std::vector<double> alphas{0.0, 0.1, 0.3, 0.5, 1.0};
  int workers = 1;
  std::optional<std::string> out_csv;
};

int cmd_ablate(const std::string& which, const AblateArgs& a, const RunConfig& config,
               std::ostream& out) {
  const Manifest manifest = load_manifest(a.manifest);
  OracleStack stack(config.oracle);
  BenchmarkOptions opts{grounding_mode_from_string(config.mode), a.workers};
  std::string csv;
  if (which == "alpha") {
    csv = alpha_table_csv(ablate_alpha(manifest, config.search, stack.oracle(), a.alphas, opts));
  } else {
    csv = atomic_table_csv(ablate_atomic(manifest, config.search, stack.oracle(), opts));
  }
  if (a.out_csv) write_text(*a.out_csv, csv);
  out << csv;
  return kExitOk;
}

struct GenArgs {
  int n = 10;
  std::uint64_t seed = 0;
  std::string out_dir = "synthetic";
  SceneSpec spec;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const GeneratedSet set = generate_synthetic_manifest(a.n, a.spec, a.seed, a.out_dir);
  out << set.manifest_path.string() << '\n';
  return kExitOk;
}

struct ExportArgs {
  std::string manifest;
  std::string out_path;
  ExportOptions options;
};

int cmd_export(const ExportArgs& a, std::ostream& out) {
  const Manifest manifest = load_manifest(a.manifest);
  const ExportResult r = export_training_examples(manifest, a.options);
  write_export(r.records, a.out_path);
  out << "records=" << r.records.size() << " skipped=" << r.skipped << '\n';
  return kExitOk;
}

int cmd_trace(const std::string& path, std::ostream& out) {
  SearchTrace trace;
  try {
    trace = read_json_file(path, ErrorKind::kConfig).get<SearchTrace>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, path + ": not a search trace: " + e.what());
  }
  out << render_tree(replay_trace(trace), trace.best);
  if (trace.error) out << "aborted: " << *trace.error << '\n';
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::kConfig: return kExitConfig;
    case ErrorCategory::kIo: return kExitIo;
    case ErrorCategory::kOracle: return kExitOracle;
    case ErrorCategory::kInternal: return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reward-guided region search and grounding for large images", "geosearch"};
  app.require_subcommand(1);

  Overrides ov;

  SearchArgs search_args;
  auto* search = app.add_subcommand("search", "Search one image and print the grounded box");
  search->add_option("--image", search_args.image, "PNG or JPEG image")->required();
  search->add_option("--query", search_args.query, "Referring expression")->required();
  search->add_option("--scene", search_args.scene,
                     "Scene file for the synthetic oracle (default: <stem>.scene.json)");
  search->add_option("--trace-out", search_args.trace_out, "Write the search trace JSON here");
  add_run_flags(search, ov, true);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate a manifest and write a report");
  eval->add_option("--manifest", eval_args.manifest, "JSON Lines manifest")->required();
  eval->add_option("--workers", eval_args.workers, "Parallel pipelines")
      ->check(CLI::PositiveNumber);
  eval->add_option("--report-out", eval_args.report_out,
                   "Report JSON path; the CSV summary goes beside it");
  eval->add_flag("--no-timing", eval_args.no_timing, "Omit timing fields from the report");
  add_run_flags(eval, ov, true);

  AblateArgs ablate_args;
  auto* ablate = app.add_subcommand("ablate", "Ablation sweeps over a manifest");
  ablate->require_subcommand(1);
  std::string ablate_kind;
  for (const std::string kind : {"alpha", "atomic"}) {
    auto* sub = ablate->add_subcommand(
        kind, kind == "alpha" ? "Sweep the QA weight alpha" : "Toggle cell order and reward terms");
    sub->add_option("--manifest", ablate_args.manifest, "JSON Lines manifest")->required();
    if (kind == "alpha") {
      sub->add_option("--alphas", ablate_args.alphas, "Comma-separated alpha values")
          ->delimiter(',');
    }
    sub->add_option("--workers", ablate_args.workers, "Parallel pipelines")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", ablate_args.out_csv, "Write the CSV table here");
    add_run_flags(sub, ov, true);
    sub->callback([&ablate_kind, kind] { ablate_kind = kind; });
  }

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic scene manifest");
  gen->add_option("--n", gen_args.n, "Number of scenes")->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", gen_args.seed, "Generator seed");
  gen->add_option("--out", gen_args.out_dir, "Output directory");
  gen->add_option("--width", gen_args.spec.extent.width, "Image width");
  gen->add_option("--height", gen_args.spec.extent.height, "Image height");
  gen->add_option("--target-min", gen_args.spec.target_min_side, "Smallest target side");
  gen->add_option("--target-max", gen_args.spec.target_max_side, "Largest target side");
  gen->add_option("--min-entities", gen_args.spec.min_entities, "Fewest entities per scene");
  gen->add_option("--max-entities", gen_args.spec.max_entities, "Most entities per scene");

  ExportArgs export_args;
  auto* exp = app.add_subcommand("export", "Export atomic-operation training records");
  exp->add_option("--manifest", export_args.manifest, "JSON Lines manifest")->required();
  exp->add_option("--out", export_args.out_path, "Output JSON Lines file")->required();
  exp->add_option("--seed", export_args.options.seed, "Sampling seed");
  exp->add_option("--qa", export_args.options.counts.qa,
                  "QA records per sample, alternating positive/negative");
  exp->add_option("--iou", export_args.options.counts.iou, "Box records per sample");
  exp->add_option("--zoom-in", export_args.options.counts.zoom_in, "Zoom-in records per sample");
  exp->add_option("--cond-ground", export_args.options.counts.cond_ground,
                  "Conditional-grounding records per sample");
  exp->add_option("--jitter", export_args.options.jitter_frac,
                  "Crop jitter as a fraction of the GT size");

  std::string trace_path;
  auto* trace = app.add_subcommand("trace", "Print a search trace as a tree");
  trace->add_option("trace", trace_path, "Trace JSON written by search --trace-out")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (search->parsed()) return cmd_search(search_args, resolve_config(ov), out);
    if (eval->parsed()) return cmd_eval(eval_args, resolve_config(ov), out);
    if (ablate->parsed()) return cmd_ablate(ablate_kind, ablate_args, resolve_config(ov), out);
    if (gen->parsed()) return cmd_gen(gen_args, out);
    if (exp->parsed()) return cmd_export(export_args, out);
    if (trace->parsed()) return cmd_trace(trace_path, out);
  } catch (const Error& e) {
    err << "geosearch: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "geosearch: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitConfig;
}

}  // namespace geosearch::cli
