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

#include "offload/errors.hpp"
#include "offload/orchestrator.hpp"
#include "test_util.hpp"

namespace offload {
namespace {

using testing::model_of;

ProgramModel one_loop_model() {
  nlohmann::json l = {{"id", "k"},     {"parent", nullptr}, {"parallelizable", true},
                      {"iteration_count", 100000}, {"per_iteration_ops", 10}, {"bytes_accessed", 1000},
                      {"fpga_resource_estimate", 0.2}};
  return model_of({l}, {}, 20.0);
}

DeviceProfile device(double speedup, double watts, bool shared = false) {
  DeviceProfile d;
  d.idle_watts = 90;
  d.active_watts = watts;
  d.default_speedup = speedup;
  d.transfer_bandwidth_bytes_per_sec = 1e9;
  d.shared_memory = shared;
  return d;
}

MachineProfile three_devices(double sm, double sg, double sf) {
  return MachineProfile({{Device::cpu, device(1, 120)},
                         {Device::manycore_cpu, device(sm, 150, true)},
                         {Device::gpu, device(sg, 150)},
                         {Device::fpga, device(sf, 150)}});
}

OrchestratorConfig quick() {
  OrchestratorConfig c;
  c.ga.generations = 5;
  c.ga.population_size = 6;
  return c;
}

TEST(Requirement, Parse) {
  auto r = UserRequirement::parse("speedup=2, energy=150.5");
  EXPECT_EQ(r.target_speedup, 2.0);
  EXPECT_EQ(r.max_energy_watt_sec, 150.5);
  EXPECT_FALSE(r.min_evaluation_value);
  EXPECT_TRUE(UserRequirement::parse("none").none());
  EXPECT_TRUE(UserRequirement::parse("").none());
  EXPECT_EQ(UserRequirement::parse("value=0.05").min_evaluation_value, 0.05);
  EXPECT_THROW(UserRequirement::parse("speedup"), InputError);
  EXPECT_THROW(UserRequirement::parse("speedup=fast"), InputError);
  EXPECT_THROW(UserRequirement::parse("speedup=0.5"), InputError);
  EXPECT_THROW(UserRequirement::parse("latency=3"), InputError);
  EXPECT_THROW(UserRequirement::parse("energy=-1"), InputError);
}

TEST(Orchestrate, EarlyStopAtManycore) {
  const auto model = one_loop_model();
  const auto profile = three_devices(3, 5, 8);
  SimulatedBackend backend;
  const auto req = UserRequirement::parse("speedup=2");
  const auto r = orchestrate(model, profile, backend, req, quick());
  ASSERT_EQ(r.tried.size(), 1u);
  EXPECT_EQ(r.tried[0].device, Device::manycore_cpu);
  EXPECT_EQ(r.stop_reason, StopReason::requirement_met);
  EXPECT_EQ(r.chosen, Device::manycore_cpu);
  ASSERT_EQ(r.skipped.size(), 2u);
  EXPECT_EQ(r.skipped[0].device, Device::gpu);
  EXPECT_EQ(r.skipped[1].device, Device::fpga);
  EXPECT_TRUE(req.satisfied_by(*r.chosen_report()));
}

TEST(Orchestrate, NoRequirementTriesAllAndPicksBest) {
  const auto model = one_loop_model();
  const auto profile = three_devices(2, 4, 8);
  SimulatedBackend backend;
  const auto r = orchestrate(model, profile, backend, {}, quick());
  ASSERT_EQ(r.tried.size(), 3u);
  EXPECT_EQ(r.tried[0].device, Device::manycore_cpu);
  EXPECT_EQ(r.tried[1].device, Device::gpu);
  EXPECT_EQ(r.tried[2].device, Device::fpga);
  const double vm = r.tried[0].report->best.value;
  const double vg = r.tried[1].report->best.value;
  const double vf = r.tried[2].report->best.value;
  EXPECT_LT(vm, vg);
  EXPECT_LT(vg, vf);
  EXPECT_EQ(r.chosen, Device::fpga);
  EXPECT_EQ(r.stop_reason, StopReason::all_tried);
  EXPECT_TRUE(r.skipped.empty());
}

TEST(Orchestrate, TiesGoToEarlierDestination) {
  const auto model = one_loop_model();
  SimulatedBackend backend;
  const auto r = orchestrate(model, three_devices(4, 4, 4), backend, {}, quick());
  ASSERT_EQ(r.tried.size(), 3u);
  EXPECT_EQ(r.chosen, Device::manycore_cpu);
}

TEST(Orchestrate, UnmetRequirementTriesEverything) {
  const auto model = one_loop_model();
  SimulatedBackend backend;
  const auto r = orchestrate(model, three_devices(2, 4, 8), backend, UserRequirement::parse("speedup=100"), quick());
  EXPECT_EQ(r.tried.size(), 3u);
  EXPECT_EQ(r.stop_reason, StopReason::all_tried);
  EXPECT_EQ(r.chosen, Device::fpga);
}

TEST(Orchestrate, FpgaOnlyProfile) {
  const auto model = one_loop_model();
  const MachineProfile profile({{Device::cpu, device(1, 120)}, {Device::fpga, device(5, 130)}});
  SimulatedBackend backend;
  const auto r = orchestrate(model, profile, backend, {}, quick());
  ASSERT_EQ(r.tried.size(), 1u);
  EXPECT_EQ(r.tried[0].device, Device::fpga);
  EXPECT_EQ(r.tried[0].report->algorithm, "fpga-flow");
}

TEST(Orchestrate, NoOffloadDevice) {
  const MachineProfile profile({{Device::cpu, device(1, 120)}});
  SimulatedBackend backend;
  EXPECT_THROW(orchestrate(one_loop_model(), profile, backend, {}, quick()), InputError);
}

class GpuBrokenBackend : public MeasurementBackend {
 public:
  Measurement measure(const BackendRequest& r) override {
    if (r.pattern.device == Device::gpu) throw BackendError("gpu node unreachable");
    return sim_.measure(r);
  }
  std::string id() const override { return sim_.id(); }

 private:
  SimulatedBackend sim_;
};

TEST(Orchestrate, FailedDestinationIsRecordedAndSkipped) {
  GpuBrokenBackend backend;
  const auto r = orchestrate(one_loop_model(), three_devices(2, 40, 8), backend, {}, quick());
  ASSERT_EQ(r.tried.size(), 3u);
  EXPECT_FALSE(r.tried[1].report);
  EXPECT_EQ(r.tried[1].error, "gpu node unreachable");
  EXPECT_EQ(r.chosen, Device::fpga);
}

}  // namespace
}  // namespace offload
