/* Copyright 2026 The offload-tuner Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <filesystem>

#include "offload/analysis.hpp"
#include "offload/backend.hpp"
#include "offload/ga_search.hpp"
#include "offload/transfer_planner.hpp"

namespace {

using namespace offload;

const std::filesystem::path kFixtures = OFFLOAD_FIXTURE_DIR;

struct Mriq {
  ProgramModel model = load_model(kFixtures / "mriq/model.json");
  MachineProfile profile = load_profile(kFixtures / "mriq/profile.json");
  OffloadPattern all_gpu = OffloadPattern::from_bits(Device::gpu, std::string(16, '1'));
};

const Mriq& mriq() {
  static const Mriq m;
  return m;
}

void BM_PlanTransfers(benchmark::State& state) {
  const auto& m = mriq();
  for (auto _ : state) benchmark::DoNotOptimize(plan_transfers(m.model, m.all_gpu));
}
BENCHMARK(BM_PlanTransfers);

void BM_SimulatedMeasure(benchmark::State& state) {
  const auto& m = mriq();
  const auto plan = plan_transfers(m.model, m.all_gpu);
  SimulatedBackend backend;
  for (auto _ : state)
    benchmark::DoNotOptimize(backend.measure(BackendRequest{m.model, m.all_gpu, plan, m.profile}));
}
BENCHMARK(BM_SimulatedMeasure);

void BM_NarrowCandidates(benchmark::State& state) {
  const auto& m = mriq();
  for (auto _ : state) benchmark::DoNotOptimize(narrow_candidates(m.model, m.profile, NarrowingConfig{}));
}
BENCHMARK(BM_NarrowCandidates);

void BM_RunGa(benchmark::State& state) {
  const auto& m = mriq();
  SimulatedBackend backend;
  GaConfig cfg;
  cfg.generations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_ga(m.model, m.profile, backend, Device::gpu, cfg));
}
BENCHMARK(BM_RunGa)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
