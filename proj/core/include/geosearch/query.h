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

#include "json.hpp"

namespace geosearch {

class Oracle;

// Free-form referring expression. Never blank.
class RawQuery {
 public:
  explicit RawQuery(std::string text);
  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
};

// Structured query: target object, optional spatial attribute and a list of
// relational references ("left of the tennis court").
struct GeoContext {
  std::string object;
  std::optional<std::string> position;
  std::vector<std::string> relations;

  // Throws ParseFailure on an empty object or an empty relation entry.
  void validate() const;

  // Number of verifiable elements: the object, the position if present,
  // and each relation. This is the QA-reward denominator.
  int element_count() const noexcept {
    return 1 + (position ? 1 : 0) + static_cast<int>(relations.size());
  }

  std::string digest() const;

  friend bool operator==(const GeoContext&, const GeoContext&) = default;
};

// {"object": str, "position": str|null, "relations": [str]}
void to_json(nlohmann::json& j, const GeoContext& ctx);
void from_json(const nlohmann::json& j, GeoContext& ctx);

// A relation split into its canonical predicate and the referenced label,
// e.g. "left of the tennis court" -> {"left of", "tennis court"}.
struct ParsedRelation {
  std::string predicate;
  std::string label;
};
std::optional<ParsedRelation> parse_relation(const std::string& relation);

// Rule-based structuring: known spatial predicates split off relations,
// known attribute words become the position, the rest is the object.
GeoContext heuristic_structure(const RawQuery& query);

// Returns `provided` verbatim when present; otherwise asks the oracle.
// Oracle failures to produce a usable structure surface as ParseFailure.
GeoContext structure_query(const RawQuery& query,
                           const std::optional<GeoContext>& provided,
                           Oracle& oracle);

}  // namespace geosearch
