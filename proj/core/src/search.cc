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

#include "geosearch/search.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace geosearch {

namespace {

std::string_view policy_name(BestNodePolicy p) {
  return p == BestNodePolicy::kMaxReward ? "max_reward" : "mean_value";
}

BestNodePolicy policy_from_name(const std::string& s) {
  if (s == "max_reward") return BestNodePolicy::kMaxReward;
  if (s == "mean_value") return BestNodePolicy::kMeanValue;
  throw Error(ErrorKind::kConfig, "unknown best_node_policy '" + s + "'");
}

// Row-major zoom-in order with the oracle's cell first, or a seeded shuffle
// when oracle guidance is disabled.
std::vector<Action> cell_order(const SearchNode& node, SearchEnv& env) {
  std::vector<int> cells(kAllCells.begin(), kAllCells.end());
  if (env.config.use_oracle_cell_order) {
    const GridCell rec = env.oracle.choose_cell(RegionView{env.image, node.region}, env.ctx);
    std::stable_partition(cells.begin(), cells.end(),
                          [&](int c) { return c == rec.index(); });
  } else {
    std::seed_seq seq{static_cast<std::uint32_t>(env.config.seed),
                      static_cast<std::uint32_t>(env.config.seed >> 32),
                      static_cast<std::uint32_t>(node.region.x1),
                      static_cast<std::uint32_t>(node.region.y1),
                      static_cast<std::uint32_t>(node.region.x2),
                      static_cast<std::uint32_t>(node.region.y2)};
    std::mt19937_64 rng(seq);
    // Fisher-Yates with an explicit draw so the order does not depend on the
    // standard library's shuffle.
    for (std::size_t i = cells.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(cells[i], cells[j]);
    }
  }
  std::vector<Action> out;
  out.reserve(10);
  for (const int c : cells) out.push_back(Action::zoom_in(GridCell(c)));
  return out;
}

PixelRect child_region(const SearchTree& tree, const SearchNode& node, const Action& a,
                       const SearchConfig& config) {
  if (a.kind == Action::Kind::kZoomIn) return grid_cell(node.region, GridCell(a.cell));
  return zoom_out(node.region, config.zoom_out_factor, tree.extent());
}

void record(SearchEnv& env, TraceEvent event) {
  if (env.trace != nullptr) env.trace->events.push_back(std::move(event));
}

}  // namespace

void SearchConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kConfig, what); };
  if (num_simulations < 0) fail("num_simulations must be >= 0");
  if (max_depth < 1) fail("max_depth must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (!(exploration >= 0.0) || !std::isfinite(exploration)) fail("c must be >= 0");
  if (!(zoom_out_factor > 1.0) || !std::isfinite(zoom_out_factor)) fail("lambda must be > 1");
  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  if (min_region_side < 3) fail("min_region_side must be >= 3");
}

void to_json(nlohmann::json& j, const SearchConfig& c) {
  j = nlohmann::json{{"num_simulations", c.num_simulations},
                     {"max_depth", c.max_depth},
                     {"alpha", c.alpha},
                     {"c", c.exploration},
                     {"lambda", c.zoom_out_factor},
                     {"epsilon", c.epsilon},
                     {"min_region_side", c.min_region_side},
                     {"seed", c.seed},
                     {"use_oracle_cell_order", c.use_oracle_cell_order},
                     {"use_qa_reward", c.use_qa_reward},
                     {"use_iou_reward", c.use_iou_reward},
                     {"enable_zoom_out", c.enable_zoom_out},
                     {"best_node_policy", policy_name(c.best_node_policy)}};
}

void from_json(const nlohmann::json& j, SearchConfig& c) {
  c.num_simulations = j.value("num_simulations", c.num_simulations);
  c.max_depth = j.value("max_depth", c.max_depth);
  c.alpha = j.value("alpha", c.alpha);
  c.exploration = j.value("c", c.exploration);
  c.zoom_out_factor = j.value("lambda", c.zoom_out_factor);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.min_region_side = j.value("min_region_side", c.min_region_side);
  c.seed = j.value("seed", c.seed);
  c.use_oracle_cell_order = j.value("use_oracle_cell_order", c.use_oracle_cell_order);
  c.use_qa_reward = j.value("use_qa_reward", c.use_qa_reward);
  c.use_iou_reward = j.value("use_iou_reward", c.use_iou_reward);
  c.enable_zoom_out = j.value("enable_zoom_out", c.enable_zoom_out);
  if (j.contains("best_node_policy")) {
    c.best_node_policy = policy_from_name(j.at("best_node_policy").get<std::string>());
  }
}

std::string to_string(const Action& a) {
  switch (a.kind) {
    case Action::Kind::kRoot:
      return "root";
    case Action::Kind::kZoomIn:
      return "in:" + std::to_string(a.cell);
    case Action::Kind::kZoomOut:
      return "out";
  }
  return "?";
}

Action action_from_string(const std::string& text) {
  if (text == "root") return Action::root();
  if (text == "out") return Action::zoom_out();
  if (text.rfind("in:", 0) == 0) {
    try {
      return Action::zoom_in(GridCell(std::stoi(text.substr(3))));
    } catch (const std::logic_error&) {
    }
  }
  throw Error(ErrorKind::kInvalidArgument, "bad action '" + text + "'");
}

SearchTree::SearchTree(PixelRect root_region, ImageExtent extent) : extent_(extent) {
  SearchNode& root = nodes_.emplace_back();
  root.region = root_region;
  root.action = Action::root();
}

NodeId SearchTree::add_child(NodeId parent, Action action, PixelRect region) {
  const NodeId id = static_cast<NodeId>(nodes_.size());
  const int depth = node(parent).depth + 1;
  SearchNode& child = nodes_.emplace_back();
  child.id = id;
  child.region = region;
  child.depth = depth;
  child.action = action;
  child.parent = parent;
  nodes_[static_cast<std::size_t>(parent)].children.emplace_back(action, id);
  return id;
}

bool SearchTree::repeats_lineage(NodeId id, const PixelRect& region) const {
  for (std::optional<NodeId> cur = id; cur; cur = node(*cur).parent) {
    if (node(*cur).region == region) return true;
  }
  return false;
}

std::vector<NodeId> SearchTree::path_to_root(NodeId id) const {
  std::vector<NodeId> path;
  for (std::optional<NodeId> cur = id; cur; cur = node(*cur).parent) path.push_back(*cur);
  return path;
}

bool is_terminal(const SearchNode& node, const SearchConfig& config) {
  return node.depth >= config.max_depth || node.region.min_side() < config.min_region_side;
}

bool has_untried_actions(const SearchNode& node, const SearchConfig& config) {
  if (is_terminal(node, config)) return false;
  return !node.candidates_ready || !node.pending.empty();
}

UctChoice uct_select(const SearchTree& tree, NodeId id, double c, double epsilon,
                     bool has_untried) {
  UctChoice choice;
  const SearchNode& node = tree.node(id);
  if (has_untried || node.children.empty()) {
    choice.expand_here = true;
    return choice;
  }
  const double log_n = std::log(static_cast<double>(std::max(node.visits, 1)));
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [action, child_id] : node.children) {
    const SearchNode& child = tree.node(child_id);
    const double score =
        child.mean_value() + c * std::sqrt(log_n / (static_cast<double>(child.visits) + epsilon));
    choice.scores.emplace_back(child_id, score);
    // Strict comparison keeps the lowest id on ties; children are stored in
    // creation (id) order.
    if (score > best) {
      best = score;
      choice.child = child_id;
    }
  }
  return choice;
}

NodeId best_node(const SearchTree& tree, BestNodePolicy policy) {
  std::optional<NodeId> best;
  double best_score = 0.0;
  for (const SearchNode& n : tree.nodes()) {
    double score;
    if (policy == BestNodePolicy::kMaxReward) {
      if (!n.value) continue;
      score = *n.value;
    } else {
      if (n.visits == 0) continue;
      score = n.mean_value();
    }
    if (!best || score > best_score ||
        (score == best_score && n.depth > tree.node(*best).depth)) {
      best = n.id;
      best_score = score;
    }
  }
  return best.value_or(tree.root());
}

NodeId expand(SearchTree& tree, NodeId id, SearchEnv& env) {
  if (!has_untried_actions(tree.node(id), env.config)) {
    throw Error(ErrorKind::kNoUntriedActions, "node " + std::to_string(id) + " is fully expanded");
  }
  if (!tree.node(id).candidates_ready) {
    std::vector<Action> order = cell_order(tree.node(id), env);
    const SearchNode& node = tree.node(id);
    if (env.config.enable_zoom_out && node.region != tree.extent().rect()) {
      order.push_back(Action::zoom_out());
    }
    // A node's lineage is fixed, so duplicates can be dropped up front.
    std::vector<Action> pending;
    for (const Action& a : order) {
      if (!tree.repeats_lineage(id, child_region(tree, node, a, env.config))) {
        pending.push_back(a);
      }
    }
    SearchNode& mut = tree.node(id);
    mut.pending = std::move(pending);
    mut.candidates_ready = true;
    if (mut.pending.empty()) {
      throw Error(ErrorKind::kNoUntriedActions,
                  "every action of node " + std::to_string(id) + " repeats an ancestor");
    }
  }
  SearchNode& node = tree.node(id);
  const Action action = node.pending.front();
  node.pending.erase(node.pending.begin());
  const PixelRect region = child_region(tree, node, action, env.config);
  const NodeId child = tree.add_child(id, action, region);
  record(env, ExpandEvent{id, action, child, region});
  return child;
}

double simulate(SearchTree& tree, NodeId id, SearchEnv& env) {
  SearchNode& node = tree.node(id);
  if (node.value) return *node.value;
  const SearchConfig& cfg = env.config;
  double value = 0.5;
  std::optional<RewardBreakdown> breakdown;
  if (cfg.use_qa_reward || cfg.use_iou_reward) {
    const double alpha = !cfg.use_qa_reward ? 0.0 : !cfg.use_iou_reward ? 1.0 : cfg.alpha;
    breakdown = evaluate_region(RegionView{env.image, node.region}, env.ctx, env.oracle,
                                env.cache, alpha);
    value = breakdown->r_total;
  }
  SearchNode& fresh = tree.node(id);
  fresh.value = value;
  fresh.reward = breakdown;
  record(env, SimulateEvent{id, value, breakdown});
  return value;
}

void backpropagate(SearchTree& tree, NodeId leaf, double value) {
  for (const NodeId id : tree.path_to_root(leaf)) {
    SearchNode& n = tree.node(id);
    n.visits += 1;
    n.value_sum += value;
  }
}

SearchAborted::SearchAborted(const Error& cause, SearchTrace trace)
    : Error(cause.kind(), std::string("search aborted: ") + cause.what()),
      trace_(std::move(trace)) {}

SearchResult run_search(const Raster& image, const RawQuery& query, const GeoContext& ctx,
                        const SearchConfig& config, Oracle& oracle) {
  config.validate();
  ctx.validate();
  CachingOracle counted(oracle);
  RewardCache cache;
  SearchTree tree(image.extent().rect(), image.extent());
  SearchTrace trace;
  trace.config = config;
  trace.query = query.text();
  trace.context = ctx;
  trace.extent = image.extent();
  SearchEnv env{image, ctx, counted, cache, config, &trace};

  auto backprop = [&](NodeId leaf, double value, bool revisit) {
    backpropagate(tree, leaf, value);
    record(env, BackpropEvent{tree.path_to_root(leaf), value, revisit});
  };

  try {
    backprop(tree.root(), simulate(tree, tree.root(), env), false);
    for (int sim = 0; sim < config.num_simulations; ++sim) {
      NodeId cur = tree.root();
      NodeId leaf = cur;
      bool fresh = false;
      while (true) {
        const SearchNode& node = tree.node(cur);
        if (is_terminal(node, config)) break;
        const bool untried = has_untried_actions(node, config);
        UctChoice choice =
            uct_select(tree, cur, config.exploration, config.epsilon, untried);
        if (choice.expand_here) {
          record(env, SelectEvent{cur, {}, std::nullopt});
          if (!untried) break;  // exhausted without children: acts as a leaf
          try {
            leaf = expand(tree, cur, env);
          } catch (const Error& e) {
            // Every candidate repeated an ancestor; the node is a leaf now.
            if (e.kind() != ErrorKind::kNoUntriedActions) throw;
            break;
          }
          fresh = true;
          break;
        }
        record(env, SelectEvent{cur, std::move(choice.scores), choice.child});
        cur = choice.child;
        leaf = cur;
      }
      if (!fresh) leaf = cur;
      const double value = simulate(tree, leaf, env);
      backprop(leaf, value, !fresh);
    }
  } catch (const Error& e) {
    trace.oracle_calls = counted.inner_calls();
    trace.best = best_node(tree, config.best_node_policy);
    trace.error = e.what();
    throw SearchAborted(e, std::move(trace));
  }

  const NodeId best = best_node(tree, config.best_node_policy);
  trace.best = best;
  trace.oracle_calls = counted.inner_calls();
  return SearchResult{std::move(tree), best, std::move(trace)};
}

}  // namespace geosearch
