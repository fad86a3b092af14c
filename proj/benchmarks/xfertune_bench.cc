/*
 * Copyright 2026 The xfertune Authors.
 *
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

#include <memory>

#include "xfertune/dtree.h"
#include "xfertune/harness.h"
#include "xfertune/lookup.h"
#include "xfertune/netsim.h"
#include "xfertune/surface.h"

namespace xfertune {
namespace {

std::shared_ptr<const LogTable> TrainingLogs() {
  static const auto logs =
      std::make_shared<const LogTable>(GenerateLogs(DefaultTrainingSpec(7)));
  return logs;
}

std::shared_ptr<const TreeBand> TrainedBand() {
  static const auto band =
      std::make_shared<const TreeBand>(TreeBand::Build(TrainingLogs(), {}));
  return band;
}

const AttributeKey kKey{1024, 1024, 38, 4.5, 1000};

void BM_TreeBuild(benchmark::State& state) {
  auto logs = TrainingLogs();
  for (auto _ : state) {
    benchmark::DoNotOptimize(DecisionTree::Build(logs, {}));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(logs->size()));
}
BENCHMARK(BM_TreeBuild)->Unit(benchmark::kMillisecond);

void BM_BandBuild(benchmark::State& state) {
  auto logs = TrainingLogs();
  for (auto _ : state) {
    benchmark::DoNotOptimize(TreeBand::Build(logs, {}));
  }
}
BENCHMARK(BM_BandBuild)->Unit(benchmark::kMillisecond);

void BM_Traverse(benchmark::State& state) {
  auto band = TrainedBand();
  for (auto _ : state) {
    benchmark::DoNotOptimize(&band->tree_di().Traverse(kKey));
  }
}
BENCHMARK(BM_Traverse);

void BM_FindOptimal(benchmark::State& state) {
  auto band = TrainedBand();
  SlaQuery q;
  q.kind = SlaKind::kMaxThroughput;
  q.target = 1000;
  SurfaceOptions options;
  options.mode = state.range(0) ? EvalMode::kPolynomial : EvalMode::kDiscrete;
  for (auto _ : state) {
    benchmark::DoNotOptimize(FindOptimal(*band, kKey, q, options));
  }
}
BENCHMARK(BM_FindOptimal)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_LookupQuery(benchmark::State& state) {
  auto band = TrainedBand();
  static const LookupTable table = LookupTable::Build(
      band, Quantization::FromTable(*TrainingLogs(), {}), {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        table.Lookup(kKey, kKey.rtt_ms, 1000, SlaKind::kMaxThroughput));
  }
}
BENCHMARK(BM_LookupQuery);

void BM_SimStep(benchmark::State& state) {
  SimScenario s = CloudLabPreset();
  SimState sim(1, 0.1, 1e18);
  TunableParams theta{4, 4, 4, 4, 2.4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(Step(sim, theta, s, {}, 1e6, 1.0, true));
  }
}
BENCHMARK(BM_SimStep);

void BM_GenerateLogs(benchmark::State& state) {
  LogGenSpec spec;
  spec.scenarios = {CloudLabPreset()};
  spec.datasets = {MediumDataset()};
  spec.grid = TrainingGrid();
  spec.repeats = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(GenerateLogs(spec));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(spec.grid.size()));
}
BENCHMARK(BM_GenerateLogs)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace xfertune

BENCHMARK_MAIN();
