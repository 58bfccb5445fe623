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

#include <memory>
#include <random>

#include "geosearch/search.h"
#include "geosearch/synthetic_data.h"
#include "geosearch/synthetic_oracle.h"

namespace geosearch {
namespace {

// Full MCTS on one synthetic scene; arg is the simulation budget.
void BM_RunSearch(benchmark::State& state) {
  std::mt19937_64 rng(2024);
  const SyntheticScene scene = make_scene(SceneSpec{}, rng);
  auto registry = std::make_shared<SceneRegistry>();
  registry->add("bench", scene);
  const Raster image = render_scene(scene, "bench");
  NoiseConfig noise;
  noise.qa_flip_prob = 0.2;
  noise.box_jitter_frac = 0.03;
  noise.cell_error_prob = 0.2;
  SyntheticOracle oracle(registry, noise);
  const RawQuery query(scene.query);
  const GeoContext ctx = oracle.parse(query);
  SearchConfig config;
  config.num_simulations = static_cast<int>(state.range(0));
  for (auto _ : state) {
    SearchResult res = run_search(image, query, ctx, config, oracle);
    benchmark::DoNotOptimize(res.best);
  }
}
BENCHMARK(BM_RunSearch)->Arg(10)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace geosearch
