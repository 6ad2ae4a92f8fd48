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

#include <cmath>

#include "offload/errors.hpp"
#include "offload/report.hpp"
#include "test_util.hpp"

namespace offload {
namespace {

using nlohmann::json;

TEST(ReportJson, MeasurementRoundTrip) {
  const auto m = measurement_from_trace({{0, 100}, {0.5, 120}, {2, 110}}, 2.5, {});
  EXPECT_EQ(measurement_from_json(to_json(m, true)), m);
  const auto brief = to_json(m);
  EXPECT_FALSE(brief.contains("samples"));
  EXPECT_FALSE(brief.contains("error"));
  const auto f = failed_measurement("gone", 80, {});
  EXPECT_EQ(to_json(f).at("error"), "gone");
  EXPECT_EQ(measurement_from_json(to_json(f, true)), f);
}

TEST(ReportJson, MeasurementRejectsJunk) {
  auto doc = to_json(constant_power_measurement(1, 1, {}));
  doc["extra"] = 1;
  EXPECT_THROW(measurement_from_json(doc), ValidationError);
  doc = to_json(constant_power_measurement(1, 1, {}));
  doc.erase("elapsed_sec");
  EXPECT_THROW(measurement_from_json(doc), ValidationError);
  EXPECT_THROW(measurement_from_json(json::array()), ValidationError);
}

TEST(ReportJson, TransferPlanEntries) {
  TransferPlan plan{{{"x", TransferDirection::host_to_device, std::nullopt, AnchorPosition::before},
                     {"y", TransferDirection::device_to_host, "l2", AnchorPosition::after}}};
  const auto j = to_json(plan);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_TRUE(j[0].at("anchor_loop").is_null());
  EXPECT_EQ(j[0].at("direction"), "host_to_device");
  EXPECT_EQ(j[1].at("anchor_loop"), "l2");
  EXPECT_EQ(j[1].at("position"), "after");
}

TEST(ReportJson, InfiniteIntensityIsNull) {
  CandidateScore s;
  s.loop_id = "a";
  s.arithmetic_intensity = INFINITY;
  s.degenerate = true;
  const auto j = to_json(s);
  EXPECT_TRUE(j.at("arithmetic_intensity").is_null());
  EXPECT_TRUE(j.at("degenerate").get<bool>());
  EXPECT_NO_THROW((void)j.dump());
}

TEST(ReportJson, SearchReportShape) {
  SearchReport r;
  r.destination = Device::fpga;
  r.algorithm = "fpga-flow";
  r.baseline.pattern = OffloadPattern::cpu_only(Device::fpga, 2);
  r.baseline.measurement = constant_power_measurement(14, 121, {});
  r.best.pattern = OffloadPattern::from_bits(Device::fpga, "01");
  r.best.measurement = constant_power_measurement(2, 111, {});
  r.best_offloaded_loops = {"b"};
  const auto j = to_json(r);
  EXPECT_EQ(j.at("schema"), kSearchReportSchema);
  EXPECT_EQ(j.at("destination"), "fpga");
  EXPECT_EQ(j.at("best").at("pattern"), "01");
  EXPECT_EQ(j.at("best").at("placement"), "cf");
  EXPECT_EQ(j.at("best").at("offloaded_loops"), json({"b"}));
  for (const char* k : {"status", "seed", "exponents", "baseline", "improvement", "transfer_plan",
                        "transfer_batches", "history", "evaluated", "candidates", "backend_calls",
                        "cache_hits", "verification_cost_sec", "budget_exhausted", "config"})
    EXPECT_TRUE(j.contains(k)) << k;
}

TEST(ReportJson, AllFailed) {
  SearchReport r;
  EXPECT_FALSE(r.all_failed());
  EvaluatedPattern e;
  e.measurement = failed_measurement("x", 1, {});
  r.evaluated = {e, e};
  EXPECT_TRUE(r.all_failed());
  r.evaluated[1].measurement = constant_power_measurement(1, 1, {});
  EXPECT_FALSE(r.all_failed());
}

TEST(ReportJson, OrchestrationShape) {
  OrchestrationReport r;
  r.requirement = UserRequirement::parse("speedup=2");
  DestinationOutcome d;
  d.device = Device::manycore_cpu;
  d.report.emplace();
  d.report->destination = Device::manycore_cpu;
  d.report->best.pattern = OffloadPattern::from_bits(Device::manycore_cpu, "1");
  d.requirement_met = true;
  r.tried.push_back(d);
  r.skipped.push_back({Device::gpu, "requirement met by manycore_cpu"});
  r.chosen = Device::manycore_cpu;
  r.stop_reason = StopReason::requirement_met;
  const auto j = to_json(r);
  EXPECT_EQ(j.at("schema"), kOrchestrationReportSchema);
  EXPECT_EQ(j.at("stop_reason"), "requirement_met");
  EXPECT_EQ(j.at("requirement").at("speedup"), 2.0);
  EXPECT_TRUE(j.at("requirement").at("energy_watt_sec").is_null());
  EXPECT_EQ(j.at("tried").size(), 1u);
  EXPECT_EQ(j.at("chosen").at("device"), "manycore_cpu");
  EXPECT_EQ(j.at("skipped")[0].at("device"), "gpu");
}

}  // namespace
}  // namespace offload
