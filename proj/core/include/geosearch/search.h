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
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "geosearch/error.h"
#include "geosearch/geometry.h"
#include "geosearch/oracle.h"
#include "geosearch/query.h"
#include "geosearch/raster.h"
#include "geosearch/reward.h"
#include "json.hpp"

namespace geosearch {

enum class BestNodePolicy {
  kMaxReward,  // highest own reward r_t among evaluated nodes
  kMeanValue,  // highest Q = W / N among visited nodes
};

struct SearchConfig {
  int num_simulations = 10;
  int max_depth = 5;
  double alpha = 0.1;
  double exploration = 1.414;  // c in the UCT score
  double zoom_out_factor = 2.0;
  double epsilon = 1e-6;
  int min_region_side = 64;
  std::uint64_t seed = 0;
  bool use_oracle_cell_order = true;
  bool use_qa_reward = true;
  bool use_iou_reward = true;
  bool enable_zoom_out = true;
  BestNodePolicy best_node_policy = BestNodePolicy::kMaxReward;

  // Throws Error(kConfig) on out-of-range values.
  void validate() const;
};

void to_json(nlohmann::json& j, const SearchConfig& c);
void from_json(const nlohmann::json& j, SearchConfig& c);

struct Action {
  enum class Kind { kRoot, kZoomIn, kZoomOut };
  Kind kind = Kind::kRoot;
  int cell = 0;  // 1..9 for kZoomIn, 0 otherwise

  static Action root() { return {Kind::kRoot, 0}; }
  static Action zoom_in(GridCell c) { return {Kind::kZoomIn, c.index()}; }
  static Action zoom_out() { return {Kind::kZoomOut, 0}; }

  friend bool operator==(const Action&, const Action&) = default;
};

// "root", "in:5", "out"
std::string to_string(const Action& a);
Action action_from_string(const std::string& text);

using NodeId = int;

struct SearchNode {
  NodeId id = 0;
  PixelRect region;
  int depth = 0;
  Action action;
  std::optional<NodeId> parent;
  std::vector<std::pair<Action, NodeId>> children;
  int visits = 0;
  double value_sum = 0.0;
  // Set once the node has been simulated.
  std::optional<double> value;
  std::optional<RewardBreakdown> reward;

  // Untried actions in expansion order, filled on first expansion.
  bool candidates_ready = false;
  std::vector<Action> pending;

  double mean_value() const noexcept { return visits > 0 ? value_sum / visits : 0.0; }
};

// Nodes live in a flat vector indexed by id; the root has id 0.
class SearchTree {
 public:
  SearchTree(PixelRect root_region, ImageExtent extent);

  NodeId root() const noexcept { return 0; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const ImageExtent& extent() const noexcept { return extent_; }
  const std::vector<SearchNode>& nodes() const noexcept { return nodes_; }
  const SearchNode& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  SearchNode& node(NodeId id) { return nodes_.at(static_cast<std::size_t>(id)); }

  NodeId add_child(NodeId parent, Action action, PixelRect region);

  // True when `region` equals the region of `id` or of any of its ancestors.
  bool repeats_lineage(NodeId id, const PixelRect& region) const;

  // Leaf first, root last.
  std::vector<NodeId> path_to_root(NodeId id) const;

 private:
  ImageExtent extent_;
  std::vector<SearchNode> nodes_;
};

// A node is terminal when it may not be expanded at all.
bool is_terminal(const SearchNode& node, const SearchConfig& config);
bool has_untried_actions(const SearchNode& node, const SearchConfig& config);

struct UctChoice {
  bool expand_here = false;
  NodeId child = -1;
  // (child id, score) for every child scored; empty when expanding.
  std::vector<std::pair<NodeId, double>> scores;
};

// Untried actions first; otherwise argmax of
//   Q(s,a) + c * sqrt(ln N(s) / (N(s,a) + epsilon))
// with ties going to the lower child id.
UctChoice uct_select(const SearchTree& tree, NodeId id, double c, double epsilon,
                     bool has_untried);

NodeId best_node(const SearchTree& tree, BestNodePolicy policy);

// ---- trace -------------------------------------------------------------------

struct SelectEvent {
  NodeId node = 0;
  std::vector<std::pair<NodeId, double>> scores;
  std::optional<NodeId> chosen;  // nullopt: expand at this node
};
struct ExpandEvent {
  NodeId parent = 0;
  Action action;
  NodeId child = 0;
  PixelRect region;
};
struct SimulateEvent {
  NodeId node = 0;
  double value = 0.0;
  std::optional<RewardBreakdown> breakdown;
};
struct BackpropEvent {
  std::vector<NodeId> path;  // leaf first
  double value = 0.0;
  bool revisit = false;  // terminal node re-backed with its cached reward
};

using TraceEvent = std::variant<SelectEvent, ExpandEvent, SimulateEvent, BackpropEvent>;

struct SearchTrace {
  SearchConfig config;
  std::string query;
  GeoContext context;
  ImageExtent extent;
  std::vector<TraceEvent> events;
  NodeId best = 0;
  int oracle_calls = 0;
  std::optional<std::string> error;
};

void to_json(nlohmann::json& j, const SearchTrace& t);
void from_json(const nlohmann::json& j, SearchTrace& t);

// Rebuilds the tree (regions, visits, values, rewards) from trace events.
SearchTree replay_trace(const SearchTrace& trace);

// Indented tree with per-node action, region, N, Q and reward.
std::string render_tree(const SearchTree& tree, std::optional<NodeId> best = std::nullopt);

// ---- engine ------------------------------------------------------------------

struct SearchEnv {
  const Raster& image;
  const GeoContext& ctx;
  Oracle& oracle;
  RewardCache& cache;
  const SearchConfig& config;
  SearchTrace* trace = nullptr;
};

// Creates the next child of `id` in expansion order: oracle-recommended cell
// first, remaining cells row-major, zoom-out last. Throws NoUntriedActions.
NodeId expand(SearchTree& tree, NodeId id, SearchEnv& env);

// One-step evaluation of a node; reuses the node's cached value on revisits.
double simulate(SearchTree& tree, NodeId id, SearchEnv& env);

void backpropagate(SearchTree& tree, NodeId leaf, double value);

struct SearchResult {
  SearchTree tree;
  NodeId best;
  SearchTrace trace;
};

// Raised when the oracle fails mid-search; carries the trace so far.
class SearchAborted : public Error {
 public:
  SearchAborted(const Error& cause, SearchTrace trace);
  const SearchTrace& trace() const noexcept { return trace_; }

 private:
  SearchTrace trace_;
};

// Evaluates the full-image root, then runs num_simulations rounds of
// select -> expand -> simulate -> backpropagate.
SearchResult run_search(const Raster& image, const RawQuery& query,
                        const GeoContext& ctx, const SearchConfig& config,
                        Oracle& oracle);

}  // namespace geosearch
