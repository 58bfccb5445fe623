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

#include <benchmark/benchmark.h>

#include <cstdlib>
#include <random>
#include <vector>

#include "geosearch/geometry.h"

namespace geosearch {
namespace {

std::vector<PixelRect> random_rects(std::size_t n, int min_side = 1) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> d(0, 1023);
  std::vector<PixelRect> out;
  while (out.size() < n) {
    const int x1 = d(rng), x2 = d(rng), y1 = d(rng), y2 = d(rng);
    if (std::abs(x1 - x2) < min_side || std::abs(y1 - y2) < min_side) continue;
    out.push_back({std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)});
  }
  return out;
}

void BM_Iou(benchmark::State& state) {
  const auto rects = random_rects(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(iou(rects[i & 1023], rects[(i + 1) & 1023]));
    ++i;
  }
}
BENCHMARK(BM_Iou);

void BM_GridTiling(benchmark::State& state) {
  const auto rects = random_rects(1024, 3);
  std::size_t i = 0;
  for (auto _ : state) {
    for (int c = 1; c <= 9; ++c) {
      benchmark::DoNotOptimize(grid_cell(rects[i & 1023], GridCell(c)));
    }
    ++i;
  }
}
BENCHMARK(BM_GridTiling);

void BM_ZoomOut(benchmark::State& state) {
  const auto rects = random_rects(1024);
  const ImageExtent extent{1024, 1024};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(zoom_out(rects[i & 1023], 2.0, extent));
    ++i;
  }
}
BENCHMARK(BM_ZoomOut);

}  // namespace
}  // namespace geosearch
