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

#include "geosearch/prompts.h"

#include <utility>

#include "geosearch/error.h"

namespace geosearch::prompts {

namespace detail {
extern const std::pair<std::string_view, std::string_view> kPromptTable[];
extern const int kPromptCount;
}  // namespace detail

std::string_view version() { return GEOSEARCH_PROMPT_VERSION; }

std::string_view get(std::string_view name) {
  for (int i = 0; i < detail::kPromptCount; ++i) {
    if (detail::kPromptTable[i].first == name) return detail::kPromptTable[i].second;
  }
  throw Error(ErrorKind::kInvalidArgument,
              "no prompt template named '" + std::string(name) + "'");
}

std::string render(std::string_view name,
                   const std::map<std::string, std::string>& vars) {
  std::string out(get(name));
  for (const auto& [key, value] : vars) {
    const std::string token = "{{" + key + "}}";
    for (std::size_t pos = out.find(token); pos != std::string::npos;
         pos = out.find(token, pos + value.size())) {
      out.replace(pos, token.size(), value);
    }
  }
  return out;
}

}  // namespace geosearch::prompts
