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

#include <gtest/gtest.h>

#include "counting_backend.hpp"
#include "offload/backend.hpp"
#include "offload/errors.hpp"
#include "offload/fpga_flow.hpp"
#include "test_util.hpp"

namespace offload {
namespace {

using nlohmann::json;
using testing::model_of;

json fpga_loop(const std::string& id, double ops, double res = 0.2) {
  return {{"id", id},        {"parent", nullptr},       {"parallelizable", true},
          {"iteration_count", 5000}, {"per_iteration_ops", ops}, {"bytes_accessed", 1000},
          {"fpga_resource_estimate", res}};
}

MachineProfile fpga_profile(std::map<std::string, double, std::less<>> speedups, double capacity = 0.8) {
  DeviceProfile cpu;
  cpu.idle_watts = 100;
  cpu.active_watts = 120;
  DeviceProfile f;
  f.idle_watts = 100;
  f.active_watts = 110;
  f.default_speedup = 0.5;
  f.speedups = std::move(speedups);
  f.transfer_bandwidth_bytes_per_sec = 1e9;
  f.compile_cost_sec = 3600;
  return MachineProfile({{Device::cpu, cpu}, {Device::fpga, f}}, capacity);
}

TEST(Combinations, OrderedBySumPairsBeforeTriples) {
  const std::vector<double> v{3, 1, 2};
  const std::vector<double> r{0.1, 0.1, 0.1};
  const auto c = plan_combinations(v, r, 1.0, 10);
  ASSERT_EQ(c.size(), 4u);
  EXPECT_EQ(c[0], (Combination{0, 2}));
  EXPECT_EQ(c[1], (Combination{0, 1}));
  EXPECT_EQ(c[2], (Combination{1, 2}));
  EXPECT_EQ(c[3], (Combination{0, 1, 2}));
  EXPECT_EQ(plan_combinations(v, r, 1.0, 2).size(), 2u);
  EXPECT_TRUE(plan_combinations(v, r, 1.0, 0).empty());
  EXPECT_TRUE(plan_combinations({1.0}, {0.1}, 1.0, 5).empty());
}

TEST(Combinations, CapacityFilter) {
  const auto c = plan_combinations({3, 2, 1}, {0.5, 0.4, 0.2}, 0.75, 10);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (Combination{0, 2}));
  EXPECT_EQ(c[1], (Combination{1, 2}));
}

TEST(FpgaFlow, NoImproversKeepsBaseline) {
  const auto model = model_of({fpga_loop("a", 10), fpga_loop("b", 20)});
  const auto profile = fpga_profile({});
  SimulatedBackend backend;
  const auto r = run_fpga_flow(model, profile, backend, {});
  EXPECT_EQ(r.status, SearchStatus::no_offload_found);
  EXPECT_FALSE(r.best.pattern.any());
  EXPECT_EQ(r.backend_calls, 3u);  // baseline + two singles
  EXPECT_EQ(r.history.size(), 1u);
}

TEST(FpgaFlow, PairBeatsSingles) {
  const auto model = model_of({fpga_loop("a", 10), fpga_loop("b", 10), fpga_loop("c", 1)});
  const auto profile = fpga_profile({{"a", 5.0}, {"b", 5.0}});
  SimulatedBackend backend;
  const auto r = run_fpga_flow(model, profile, backend, {});
  EXPECT_EQ(r.status, SearchStatus::ok);
  EXPECT_EQ(r.best.pattern.bits(), "110");
  ASSERT_EQ(r.history.size(), 2u);
  EXPECT_EQ(r.history[1].evaluated, 1u);  // only a+b improved
  // The chosen pattern strictly beats each single.
  for (const auto& e : r.evaluated)
    if (e.pattern.count() == 1) EXPECT_GT(r.best.value, e.value);
  double cost = 0;
  for (const auto& e : r.evaluated) cost += e.measurement.elapsed_sec + (e.pattern.any() ? 3600 : 0);
  EXPECT_DOUBLE_EQ(r.verification_cost_sec, cost);
}

TEST(FpgaFlow, CallBudgetAndCapacity) {
  std::vector<json> loops;
  std::map<std::string, double, std::less<>> sp;
  for (int i = 0; i < 6; ++i) {
    const auto id = "l" + std::to_string(i);
    loops.push_back(fpga_loop(id, 10 + i, 0.3));
    sp[id] = 2.0 + i;
  }
  const auto model = model_of(json(loops));
  const auto profile = fpga_profile(sp, 0.65);
  SimulatedBackend sim;
  testing::CountingBackend backend(sim);
  FpgaFlowConfig cfg;
  cfg.combination_limit = 3;
  const auto r = run_fpga_flow(model, profile, backend, cfg);
  EXPECT_LE(backend.calls(), 1 + cfg.k + cfg.combination_limit);
  EXPECT_EQ(r.candidates.size(), 4u);
  for (const auto& e : r.evaluated) {
    double used = 0;
    for (std::size_t g = 0; g < e.pattern.size(); ++g) used += e.pattern.genes[g] ? 0.3 : 0.0;
    EXPECT_LE(used, 0.65 + 1e-12);
    EXPECT_LE(e.pattern.count(), 2u);  // triples exceed capacity
  }
  EXPECT_GE(r.best.value, r.baseline.value);
}

TEST(FpgaFlow, NoCandidatesIsExplicit) {
  auto l = fpga_loop("a", 10);
  l["iteration_count"] = 5;
  const auto model = model_of({l});
  SimulatedBackend backend;
  const auto r = run_fpga_flow(model, fpga_profile({{"a", 10.0}}), backend, {});
  EXPECT_EQ(r.status, SearchStatus::no_offload_found);
  EXPECT_TRUE(r.candidates.empty());
  EXPECT_EQ(r.backend_calls, 1u);
}

TEST(FpgaFlow, MriqReplay) {
  const auto model = load_model(testing::fixture("mriq/model.json"));
  const auto profile = load_profile(testing::fixture("mriq/profile.json"));
  ReplayBackend backend(testing::fixture("mriq/replay"));
  const auto r = run_fpga_flow(model, profile, backend, {});
  EXPECT_EQ(r.best_offloaded_loops, (std::vector<std::string>{"computeq_samples"}));
  EXPECT_DOUBLE_EQ(r.best.measurement.elapsed_sec, 2.0);
  EXPECT_NEAR(r.best.measurement.energy_watt_sec, 223.0, 223.0 * 0.01);
  EXPECT_NEAR(r.baseline.measurement.energy_watt_sec, 1690.0, 1690.0 * 0.01);
  EXPECT_DOUBLE_EQ(r.time_improvement, 7.0);
  EXPECT_EQ(r.backend_calls, 5u);
  EXPECT_FALSE(r.all_failed());
}

TEST(FpgaFlow, RequiresFpgaInProfile) {
  const auto model = model_of({fpga_loop("a", 10)});
  SimulatedBackend backend;
  EXPECT_THROW(run_fpga_flow(model, testing::simple_profile(Device::gpu), backend, {}), ValidationError);
  FpgaFlowConfig bad;
  bad.k = 0;
  EXPECT_THROW(run_fpga_flow(model, fpga_profile({}), backend, bad), InputError);
}

}  // namespace
}  // namespace offload
