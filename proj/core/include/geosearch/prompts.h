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

#include <map>
#include <string>
#include <string_view>

namespace geosearch::prompts {

// Version tag of the compiled-in template set.
std::string_view version();

// Raw template by name: parse, qa_verify, predict_box, choose_cell,
// conditional_ground, reformat. Throws InvalidArgument for unknown names.
std::string_view get(std::string_view name);

// Replaces every {{key}} with its value. Unknown placeholders are left as is.
std::string render(std::string_view name,
                   const std::map<std::string, std::string>& vars);

}  // namespace geosearch::prompts
