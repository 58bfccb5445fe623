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

#include <span>

namespace geosearch {

// Fraction of IoUs >= tau. Throws EmptyInput on an empty list.
double precision_at(std::span<const double> ious, double tau);

// Arithmetic mean. Throws EmptyInput on an empty list.
double mean_iou(std::span<const double> ious);

}  // namespace geosearch
