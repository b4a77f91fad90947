//
// Copyright 2026 The Canary Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <cstdint>
#include <vector>

#include "benchmark/benchmark.h"
#include "canary_audit/attack.h"
#include "canary_audit/audit.h"
#include "canary_audit/baseline.h"
#include "canary_audit/exposure.h"
#include "canary_audit/ingest.h"
#include "canary_audit/simulate.h"

namespace canary_audit {
namespace {

AuditDataset Dataset(int64_t size) {
  return *Simulate(
      {.mu = 1.0, .sigma = 1.0, .m = size, .n = size, .seed = 1});
}

void BM_ComputeExposures(benchmark::State& state) {
  const AuditDataset dataset = Dataset(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeExposures(dataset));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeExposures)->Range(1 << 10, 1 << 17);

void BM_Roc(benchmark::State& state) {
  const AuditDataset dataset = Dataset(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Roc(dataset));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Roc)->Range(1 << 10, 1 << 17);

void BM_ClopperPearson(benchmark::State& state) {
  const int64_t trials = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ClopperPearson(trials / 3, trials, 0.025, BoundSide::kLower));
  }
}
BENCHMARK(BM_ClopperPearson)->Range(10, 1 << 20);

void BM_ExpectedExposureExact(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(ExpectedExposureExact(state.range(0)));
  }
}
BENCHMARK(BM_ExpectedExposureExact)->Arg(1000000);

void BM_RunAudit(benchmark::State& state) {
  const AuditDataset dataset = Dataset(state.range(0));
  AuditConfig config;
  config.operating_points.push_back(OperatingPoint::FprTarget(0.001));
  config.baseline_trials = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunAudit(dataset, config));
  }
}
BENCHMARK(BM_RunAudit)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace canary_audit

BENCHMARK_MAIN();
