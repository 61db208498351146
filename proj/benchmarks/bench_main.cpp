/*
 * Copyright 2026 The Blendemo Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <random>

#include "blendemo/adamw.hpp"
#include "blendemo/featsel.hpp"
#include "blendemo/nn.hpp"
#include "blendemo/trainer.hpp"

namespace {

using namespace blendemo;

std::vector<std::string> canonical_names() {
  return {kCanonicalBlendshapeNames.begin(), kCanonicalBlendshapeNames.end()};
}

BlendshapeDataset synthetic(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BlendshapeDataset ds;
  ds.blendshape_names = canonical_names();
  for (std::size_t i = 0; i < n; ++i) {
    LabeledSample s;
    s.label3 = static_cast<ClassLabel>(i % 3);
    s.frame.index = i;
    for (std::size_t j = 0; j < kNumBlendshapes; ++j) s.frame.scores.push_back(u(rng));
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Sequence one_frame(int dim) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector x(dim);
  for (int i = 0; i < dim; ++i) x[i] = u(rng);
  return {x};
}

void BM_Forward(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  auto p = init_parameters(kDefaultLayerUnits, dim, 0);
  auto seq = one_frame(dim);
  for (auto _ : state) benchmark::DoNotOptimize(forward(p, seq).probabilities);
}
BENCHMARK(BM_Forward)->Arg(27)->Arg(52);

void BM_ForwardBackward(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  auto p = init_parameters(kDefaultLayerUnits, dim, 0);
  auto seq = one_frame(dim);
  const std::vector<double> target{0, 1, 0};
  for (auto _ : state) {
    auto fwd = forward(p, seq);
    benchmark::DoNotOptimize(backward(p, fwd.cache, target, {}));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(27)->Arg(52);

void BM_AdamWStep(benchmark::State& state) {
  auto p = init_parameters(kDefaultLayerUnits, 27, 0);
  auto g = init_parameters(kDefaultLayerUnits, 27, 1);
  auto opt = AdamWState::for_params(p);
  AdamWConfig cfg;
  for (auto _ : state) {
    adamw_step(p, global_clipnorm(g, 1.0), opt, cfg);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_AdamWStep);

void BM_TrainEpoch(benchmark::State& state) {
  auto ds = synthetic(static_cast<std::size_t>(state.range(0)), 2);
  TrainConfig cfg;
  cfg.max_epochs = 1;
  cfg.threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    Model m = init_model(kDefaultLayerUnits, FeatureMask::identity(canonical_names()), 0);
    benchmark::DoNotOptimize(train(m, ds, ds, cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainEpoch)->Args({512, 1})->Args({512, 4})->Unit(benchmark::kMillisecond);

void BM_CountActivations(benchmark::State& state) {
  auto ds = synthetic(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(count_activations(ds, 0.4));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CountActivations)->Arg(28709);

}  // namespace

BENCHMARK_MAIN();
