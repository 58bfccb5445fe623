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

#include "geosearch/query.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <string_view>

#include "geosearch/digest.h"
#include "geosearch/error.h"
#include "geosearch/oracle.h"

namespace geosearch {

namespace {

std::string trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '-' || c == '\'') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::string join(const std::vector<std::string>& tokens, std::size_t begin,
                 std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

struct PredicatePattern {
  std::vector<std::string_view> words;
  std::string_view canonical;
};

// Longest patterns first so "to the left of" wins over "left of".
const std::vector<PredicatePattern>& predicate_patterns() {
  static const std::vector<PredicatePattern> kPatterns = [] {
    std::vector<PredicatePattern> p = {
        {{"to", "the", "left", "of"}, "left of"},
        {{"on", "the", "left", "of"}, "left of"},
        {{"to", "the", "right", "of"}, "right of"},
        {{"on", "the", "right", "of"}, "right of"},
        {{"left", "of"}, "left of"},
        {{"right", "of"}, "right of"},
        {{"next", "to"}, "near"},
        {{"close", "to"}, "near"},
        {{"above"}, "above"},
        {{"below"}, "below"},
        {{"under"}, "below"},
        {{"near"}, "near"},
        {{"beside"}, "near"},
    };
    std::stable_sort(p.begin(), p.end(), [](const auto& a, const auto& b) {
      return a.words.size() > b.words.size();
    });
    return p;
  }();
  return kPatterns;
}

struct PredicateMatch {
  std::size_t begin;
  std::size_t end;
  std::string_view canonical;
};

std::vector<PredicateMatch> find_predicates(
    const std::vector<std::string>& tokens) {
  std::vector<PredicateMatch> matches;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    for (const auto& pat : predicate_patterns()) {
      if (i + pat.words.size() > tokens.size()) continue;
      bool eq = true;
      for (std::size_t k = 0; k < pat.words.size(); ++k) {
        if (tokens[i + k] != pat.words[k]) {
          eq = false;
          break;
        }
      }
      if (eq) {
        matches.push_back({i, i + pat.words.size(), pat.canonical});
        i += pat.words.size();
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return matches;
}

const std::set<std::string, std::less<>>& position_words() {
  static const std::set<std::string, std::less<>> kWords = {
      "largest", "smallest", "biggest", "tiniest", "longest", "shortest",
      "leftmost", "rightmost", "topmost", "bottommost", "uppermost",
      "lowermost", "upper", "lower", "top", "bottom", "central", "middle",
      "northern", "southern", "eastern", "western", "northernmost",
      "southernmost", "easternmost", "westernmost", "large", "small",
  };
  return kWords;
}

bool is_article(std::string_view w) {
  return w == "the" || w == "a" || w == "an";
}

bool is_filler(std::string_view w) {
  return w == "that" || w == "which" || w == "is" || w == "located" ||
         w == "situated" || w == "lies" || w == "and" || w == "find" ||
         w == "locate";
}

}  // namespace

RawQuery::RawQuery(std::string text) : text_(trim(text)) {
  if (text_.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "query text is empty");
  }
}

void GeoContext::validate() const {
  if (trim(object).empty()) {
    throw Error(ErrorKind::kParseFailure, "structured query has no object");
  }
  if (position && trim(*position).empty()) {
    throw Error(ErrorKind::kParseFailure, "structured query has a blank position");
  }
  for (const auto& r : relations) {
    if (trim(r).empty()) {
      throw Error(ErrorKind::kParseFailure,
                  "structured query has an empty relation");
    }
  }
}

std::string GeoContext::digest() const {
  return sha256_hex(nlohmann::json(*this).dump());
}

void to_json(nlohmann::json& j, const GeoContext& ctx) {
  j = nlohmann::json{{"object", ctx.object},
                     {"position", ctx.position ? nlohmann::json(*ctx.position)
                                               : nlohmann::json(nullptr)},
                     {"relations", ctx.relations}};
}

void from_json(const nlohmann::json& j, GeoContext& ctx) {
  if (!j.is_object() || !j.contains("object") || !j["object"].is_string()) {
    throw Error(ErrorKind::kParseFailure,
                "structured query needs a string \"object\": " + j.dump());
  }
  ctx.object = j["object"].get<std::string>();
  ctx.position.reset();
  if (j.contains("position") && !j["position"].is_null()) {
    if (!j["position"].is_string()) {
      throw Error(ErrorKind::kParseFailure, "\"position\" must be a string or null");
    }
    ctx.position = j["position"].get<std::string>();
  }
  ctx.relations.clear();
  if (j.contains("relations") && !j["relations"].is_null()) {
    if (!j["relations"].is_array()) {
      throw Error(ErrorKind::kParseFailure, "\"relations\" must be an array");
    }
    for (const auto& r : j["relations"]) {
      if (!r.is_string()) {
        throw Error(ErrorKind::kParseFailure, "relations must be strings");
      }
      ctx.relations.push_back(r.get<std::string>());
    }
  }
  ctx.validate();
}

std::optional<ParsedRelation> parse_relation(const std::string& relation) {
  const std::vector<std::string> tokens = tokenize(relation);
  const std::vector<PredicateMatch> matches = find_predicates(tokens);
  if (matches.empty() || matches.front().begin != 0) return std::nullopt;
  std::size_t begin = matches.front().end;
  while (begin < tokens.size() && is_article(tokens[begin])) ++begin;
  if (begin >= tokens.size()) return std::nullopt;
  return ParsedRelation{std::string(matches.front().canonical),
                        join(tokens, begin, tokens.size())};
}

GeoContext heuristic_structure(const RawQuery& query) {
  const std::vector<std::string> tokens = tokenize(query.text());
  const std::vector<PredicateMatch> matches = find_predicates(tokens);
  const std::size_t head_end = matches.empty() ? tokens.size() : matches[0].begin;

  GeoContext ctx;
  std::vector<std::string> position;
  std::vector<std::string> object;
  for (std::size_t i = 0; i < head_end; ++i) {
    const std::string& w = tokens[i];
    if (is_article(w) || is_filler(w)) continue;
    if (position_words().count(w) != 0) {
      position.push_back(w);
    } else {
      object.push_back(w);
    }
  }
  ctx.object = join(object, 0, object.size());
  if (!position.empty()) ctx.position = join(position, 0, position.size());

  for (std::size_t m = 0; m < matches.size(); ++m) {
    const std::size_t begin = matches[m].end;
    std::size_t end = m + 1 < matches.size() ? matches[m + 1].begin : tokens.size();
    while (end > begin && (tokens[end - 1] == "and" || is_filler(tokens[end - 1]))) {
      --end;
    }
    if (end <= begin) continue;
    ctx.relations.push_back(std::string(matches[m].canonical) + " " +
                            join(tokens, begin, end));
  }
  if (ctx.object.empty()) {
    throw Error(ErrorKind::kParseFailure,
                "no target object found in \"" + query.text() + "\"");
  }
  return ctx;
}

GeoContext structure_query(const RawQuery& query,
                           const std::optional<GeoContext>& provided,
                           Oracle& oracle) {
  if (provided) return *provided;
  try {
    GeoContext ctx = oracle.parse(query);
    ctx.validate();
    return ctx;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kMalformedResponse) {
      throw Error(ErrorKind::kParseFailure, e.what());
    }
    throw;
  }
}

}  // namespace geosearch
