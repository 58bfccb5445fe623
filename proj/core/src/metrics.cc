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

#include "geosearch/metrics.h"

#include "geosearch/error.h"

namespace geosearch {

double precision_at(std::span<const double> ious, double tau) {
  if (ious.empty()) throw Error(ErrorKind::kEmptyInput, "precision_at needs at least one IoU");
  std::size_t hits = 0;
  for (const double v : ious) hits += v >= tau ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(ious.size());
}

double mean_iou(std::span<const double> ious) {
  if (ious.empty()) throw Error(ErrorKind::kEmptyInput, "mean_iou needs at least one IoU");
  double sum = 0.0;
  for (const double v : ious) sum += v;
  return sum / static_cast<double>(ious.size());
}

}  // namespace geosearch
