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

#include <iomanip>
#include <sstream>

#include "geosearch/search.h"

namespace geosearch {

namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json event_to_json(const TraceEvent& ev) {
  return std::visit(
      Overloaded{
          [](const SelectEvent& e) {
            json scores = json::array();
            for (const auto& [id, s] : e.scores) scores.push_back({{"child", id}, {"score", s}});
            return json{{"type", "select"},
                        {"node", e.node},
                        {"scores", scores},
                        {"chosen", e.chosen ? json(*e.chosen) : json(nullptr)}};
          },
          [](const ExpandEvent& e) {
            return json{{"type", "expand"},
                        {"parent", e.parent},
                        {"action", to_string(e.action)},
                        {"child", e.child},
                        {"region", e.region}};
          },
          [](const SimulateEvent& e) {
            return json{{"type", "simulate"},
                        {"node", e.node},
                        {"value", e.value},
                        {"breakdown", e.breakdown ? json(*e.breakdown) : json(nullptr)}};
          },
          [](const BackpropEvent& e) {
            return json{{"type", "backprop"},
                        {"path", e.path},
                        {"value", e.value},
                        {"revisit", e.revisit}};
          },
      },
      ev);
}

TraceEvent event_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "select") {
    SelectEvent e;
    e.node = j.at("node").get<NodeId>();
    for (const auto& s : j.at("scores")) {
      e.scores.emplace_back(s.at("child").get<NodeId>(), s.at("score").get<double>());
    }
    if (!j.at("chosen").is_null()) e.chosen = j["chosen"].get<NodeId>();
    return e;
  }
  if (type == "expand") {
    return ExpandEvent{j.at("parent").get<NodeId>(),
                       action_from_string(j.at("action").get<std::string>()),
                       j.at("child").get<NodeId>(), j.at("region").get<PixelRect>()};
  }
  if (type == "simulate") {
    SimulateEvent e;
    e.node = j.at("node").get<NodeId>();
    e.value = j.at("value").get<double>();
    if (!j.at("breakdown").is_null()) e.breakdown = j["breakdown"].get<RewardBreakdown>();
    return e;
  }
  if (type == "backprop") {
    return BackpropEvent{j.at("path").get<std::vector<NodeId>>(), j.at("value").get<double>(),
                         j.at("revisit").get<bool>()};
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown trace event type '" + type + "'");
}

void render_node(const SearchTree& tree, NodeId id, int indent, std::optional<NodeId> best,
                 std::ostringstream& out) {
  const SearchNode& n = tree.node(id);
  out << std::string(static_cast<std::size_t>(indent) * 2, ' ') << '#' << n.id << ' '
      << to_string(n.action) << ' ' << n.region << " N=" << n.visits << " Q=" << std::fixed
      << std::setprecision(4) << n.mean_value() << " r=";
  if (n.value) {
    out << *n.value;
  } else {
    out << '-';
  }
  if (best && *best == id) out << "  *best";
  out << '\n';
  for (const auto& [action, child] : n.children) render_node(tree, child, indent + 1, best, out);
}

}  // namespace

void to_json(nlohmann::json& j, const SearchTrace& t) {
  json events = json::array();
  for (const auto& ev : t.events) events.push_back(event_to_json(ev));
  j = json{{"config", t.config},
           {"query", t.query},
           {"context", t.context},
           {"extent", {{"width", t.extent.width}, {"height", t.extent.height}}},
           {"events", std::move(events)},
           {"best", t.best},
           {"oracle_calls", t.oracle_calls},
           {"error", t.error ? json(*t.error) : json(nullptr)}};
}

void from_json(const nlohmann::json& j, SearchTrace& t) {
  t.config = j.at("config").get<SearchConfig>();
  t.query = j.at("query").get<std::string>();
  t.context = j.at("context").get<GeoContext>();
  t.extent = ImageExtent{j.at("extent").at("width").get<int>(),
                         j.at("extent").at("height").get<int>()};
  t.events.clear();
  for (const auto& ev : j.at("events")) t.events.push_back(event_from_json(ev));
  t.best = j.at("best").get<NodeId>();
  t.oracle_calls = j.at("oracle_calls").get<int>();
  t.error.reset();
  if (j.contains("error") && !j["error"].is_null()) t.error = j["error"].get<std::string>();
}

SearchTree replay_trace(const SearchTrace& trace) {
  if (!trace.extent.valid()) {
    throw Error(ErrorKind::kInvalidArgument, "trace has an invalid image extent");
  }
  SearchTree tree(trace.extent.rect(), trace.extent);
  auto check = [&](NodeId id) {
    if (id < 0 || static_cast<std::size_t>(id) >= tree.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "trace references unknown node " + std::to_string(id));
    }
  };
  for (const auto& ev : trace.events) {
    if (const auto* e = std::get_if<ExpandEvent>(&ev)) {
      check(e->parent);
      const NodeId id = tree.add_child(e->parent, e->action, e->region);
      if (id != e->child) {
        throw Error(ErrorKind::kInvalidArgument, "trace expansion ids are out of order");
      }
    } else if (const auto* s = std::get_if<SimulateEvent>(&ev)) {
      check(s->node);
      tree.node(s->node).value = s->value;
      tree.node(s->node).reward = s->breakdown;
    } else if (const auto* b = std::get_if<BackpropEvent>(&ev)) {
      if (b->path.empty()) continue;
      check(b->path.front());
      backpropagate(tree, b->path.front(), b->value);
    }
  }
  return tree;
}

std::string render_tree(const SearchTree& tree, std::optional<NodeId> best) {
  std::ostringstream out;
  render_node(tree, tree.root(), 0, best, out);
  return out.str();
}

}  // namespace geosearch
