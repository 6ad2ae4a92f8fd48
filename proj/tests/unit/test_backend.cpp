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

#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include "offload/backend.hpp"
#include "offload/errors.hpp"
#include "test_util.hpp"

namespace offload {
namespace {

using testing::loop_json;
using testing::model_of;
using testing::var_json;

double total_time(const std::vector<SimulatedPhase>& phases) {
  double t = 0;
  for (const auto& p : phases) t += p.duration_sec;
  return t;
}

TEST(CostModel, SplitsBaselineByWork) {
  const auto model = model_of({loop_json("a", nullptr, 10, 1), loop_json("b", nullptr, 10, 3)}, {}, 8.0);
  EXPECT_EQ(cpu_loop_seconds(model), (std::vector<double>{2.0, 6.0}));
  EXPECT_DOUBLE_EQ(serial_cpu_seconds(model), 0.0);
}

TEST(CostModel, ExplicitTimesAndRemainder) {
  auto a = loop_json("a", nullptr, 10, 1);
  a["cpu_time_sec"] = 3.0;
  auto b = loop_json("b", nullptr, 10, 1);
  b["cpu_time_sec"] = 1.0;
  auto model = model_of({a, b}, {}, 10.0);
  EXPECT_EQ(cpu_loop_seconds(model), (std::vector<double>{3.0, 1.0}));
  EXPECT_DOUBLE_EQ(serial_cpu_seconds(model), 6.0);

  model = model_of({a, loop_json("c", nullptr, 5, 2)}, {}, 10.0);
  EXPECT_EQ(cpu_loop_seconds(model), (std::vector<double>{3.0, 7.0}));
}

TEST(CostModel, ZeroWorkSplitsEvenly) {
  const auto model = model_of({loop_json("a", nullptr, 0, 0), loop_json("b", nullptr, 0, 0)}, {}, 4.0);
  EXPECT_EQ(cpu_loop_seconds(model), (std::vector<double>{2.0, 2.0}));
}

TEST(Simulated, CpuOnlyRunIsBaseline) {
  const auto model = model_of({loop_json("a"), loop_json("b")}, {}, 14.0);
  const auto profile = testing::simple_profile(Device::gpu);
  SimulatedBackend backend;
  const auto m = backend.measure({model, OffloadPattern::cpu_only(Device::gpu, 2), {}, profile});
  EXPECT_DOUBLE_EQ(m.elapsed_sec, 14.0);
  EXPECT_DOUBLE_EQ(m.mean_watts, 120.0);
  EXPECT_DOUBLE_EQ(m.energy_watt_sec, 14.0 * 120.0);
  EXPECT_FALSE(m.timed_out);
}

TEST(Simulated, OffloadAddsDeviceTimeAndTransfers) {
  // a: 4 s, b: 4 s; b offloaded at 4x; x (1e9 bytes at 1e9 B/s) copied once.
  const auto model = model_of({loop_json("a"), loop_json("b")},
                              {var_json("x", 1000000000, {{"a", "write"}, {"b", "read"}})}, 8.0);
  const auto profile = testing::simple_profile(Device::gpu, 4.0, 1e9);
  const auto p = OffloadPattern::from_bits(Device::gpu, "01");
  BackendRequest req{model, p, plan_transfers(model, p), profile};
  const auto phases = simulate_phases(req);
  ASSERT_EQ(phases.size(), 3u);
  EXPECT_EQ(phases[0].kind, PhaseKind::cpu_compute);
  EXPECT_EQ(phases[1].kind, PhaseKind::transfer);
  EXPECT_EQ(phases[1].label, "x");
  EXPECT_DOUBLE_EQ(phases[1].duration_sec, 1.0);
  EXPECT_EQ(phases[2].kind, PhaseKind::device_compute);
  EXPECT_DOUBLE_EQ(phases[2].duration_sec, 1.0);

  const auto m = SimulatedBackend().measure(req);
  EXPECT_DOUBLE_EQ(m.elapsed_sec, 6.0);
  EXPECT_DOUBLE_EQ(m.energy_watt_sec, 4 * 120.0 + 2 * 200.0);
}

TEST(Simulated, TransfersInsideLoopsRepeat) {
  const auto model = model_of({loop_json("outer", nullptr, 50, 1, false), loop_json("dev", "outer"),
                               loop_json("upd", "outer", 10, 1, false)},
                              {var_json("x", 1000, {{"dev", "read"}, {"upd", "write"}})}, 1.0);
  const auto profile = testing::simple_profile(Device::gpu, 1.0, 1e6);
  const auto p = OffloadPattern::from_bits(Device::gpu, "1");
  BackendRequest req{model, p, plan_transfers(model, p), profile};
  EXPECT_NEAR(total_time(simulate_phases(req)), 1.0 + 50 * 1e-3, 1e-12);
}

TEST(Simulated, LongRunsTimeOut) {
  const auto model = model_of({loop_json("a")}, {}, 200.0);
  const auto profile = testing::simple_profile(Device::gpu, 0.5);
  SimulatedBackend backend;
  auto m = backend.measure({model, OffloadPattern::cpu_only(Device::gpu, 1), {}, profile});
  EXPECT_TRUE(m.timed_out);
  EXPECT_DOUBLE_EQ(m.elapsed_sec, 1000.0);
  EXPECT_DOUBLE_EQ(m.mean_watts, 120.0);

  const auto fast = model_of({loop_json("a")}, {}, 100.0);
  m = backend.measure({fast, OffloadPattern::from_bits(Device::gpu, "1"), {}, profile});
  EXPECT_TRUE(m.timed_out);  // 200 s on a slow device
  m = backend.measure({fast, OffloadPattern::cpu_only(Device::gpu, 1), {}, profile});
  EXPECT_FALSE(m.timed_out);
}

TEST(Simulated, MissingDeviceIsValidationError) {
  const auto model = model_of({loop_json("a")});
  const auto profile = testing::simple_profile(Device::gpu);
  EXPECT_THROW(SimulatedBackend().measure({model, OffloadPattern::from_bits(Device::fpga, "1"), {}, profile}),
               ValidationError);
}

TEST(Simulated, IdEncodesPolicy) {
  EXPECT_NE(SimulatedBackend({180, 1000}).id(), SimulatedBackend({100, 1000}).id());
}

TEST(Replay, MriqFixture) {
  const auto model = load_model(testing::fixture("mriq/model.json"));
  const auto profile = load_profile(testing::fixture("mriq/profile.json"));
  ReplayBackend backend(testing::fixture("mriq/replay"));
  EXPECT_EQ(backend.index().size(), 5u);
  auto m = backend.measure({model, OffloadPattern::cpu_only(Device::fpga, 16), {}, profile});
  EXPECT_DOUBLE_EQ(m.elapsed_sec, 14.0);
  EXPECT_NEAR(m.energy_watt_sec, 1694.0, 1e-9);
  auto hot = OffloadPattern::cpu_only(Device::fpga, 16);
  hot.genes[13] = 1;
  m = backend.measure({model, hot, {}, profile});
  EXPECT_NEAR(m.energy_watt_sec, 222.0, 1e-9);
  hot.genes[0] = 1;
  m = backend.measure({model, hot, {}, profile});
  EXPECT_TRUE(m.failed);
  EXPECT_NE(m.error.find("no recorded run"), std::string::npos);
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("offload-test-" + std::to_string(::getpid()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  void write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }
  std::filesystem::path dir_;
};

using ReplayFiles = TempDir;

TEST_F(ReplayFiles, MalformedIndexThrows) {
  EXPECT_THROW(ReplayBackend{dir_}, InputError);
  write("index.csv", "fp,seconds\n");
  EXPECT_THROW(ReplayBackend{dir_}, ParseError);
  write("index.csv", "fingerprint,elapsed_sec\nabc,-1\n");
  EXPECT_THROW(ReplayBackend{dir_}, ParseError);
}

TEST_F(ReplayFiles, BrokenTraceIsFailedMeasurement) {
  const auto model = model_of({loop_json("a")});
  const auto profile = testing::simple_profile(Device::gpu);
  const auto p = OffloadPattern::from_bits(Device::gpu, "1");
  write("index.csv", "fingerprint,elapsed_sec\n" + p.fingerprint() + ",3\n");
  write(p.fingerprint() + ".csv", "t_sec,watts\n0,oops\n");
  const auto m = ReplayBackend(dir_).measure({model, p, {}, profile});
  EXPECT_TRUE(m.failed);
  EXPECT_DOUBLE_EQ(m.elapsed_sec, 1000.0);
}

TEST_F(ReplayFiles, TimedOutRecording) {
  const auto model = model_of({loop_json("a")});
  const auto profile = testing::simple_profile(Device::gpu);
  const auto p = OffloadPattern::from_bits(Device::gpu, "1");
  write("index.csv", "fingerprint,elapsed_sec\n" + p.fingerprint() + ",400\n");
  write(p.fingerprint() + ".csv", "t_sec,watts\n0,150\n400,150\n");
  const auto m = ReplayBackend(dir_).measure({model, p, {}, profile});
  EXPECT_TRUE(m.timed_out);
  EXPECT_FALSE(m.failed);
  EXPECT_DOUBLE_EQ(m.elapsed_sec, 1000.0);
  EXPECT_DOUBLE_EQ(m.mean_watts, 150.0);
}

using CommandFiles = TempDir;

TEST_F(CommandFiles, RunsScriptAndReadsTrace) {
  write("run.sh",
        "#!/bin/sh\n"
        "grep -q '\"genes\": \"1\"' \"$1\" || exit 9\n"
        "printf 't_sec,watts\\n0,%s\\n2,%s\\n' \"$OFFLOAD_TUNER_TIMEOUT_SEC\" \"$OFFLOAD_TUNER_TIMEOUT_SEC\" > \"$2\"\n"
        "echo compiling...\n"
        "echo elapsed_sec=2\n");
  const auto model = model_of({loop_json("a")});
  const auto profile = testing::simple_profile(Device::gpu);
  CommandBackend backend("sh " + (dir_ / "run.sh").string() + " {pattern_file} {trace_out}", {150, 1000}, 2,
                         dir_);
  const auto m = backend.measure({model, OffloadPattern::from_bits(Device::gpu, "1"), {}, profile});
  ASSERT_FALSE(m.failed) << m.error;
  EXPECT_DOUBLE_EQ(m.elapsed_sec, 2.0);
  EXPECT_DOUBLE_EQ(m.mean_watts, 150.0);  // the script echoed the timeout as its power
  EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir_), {}), 1);  // temp files removed
}

TEST_F(CommandFiles, FailuresBecomeFailedMeasurements) {
  const auto model = model_of({loop_json("a")});
  const auto profile = testing::simple_profile(Device::gpu);
  const BackendRequest req{model, OffloadPattern::from_bits(Device::gpu, "1"), {}, profile};
  EXPECT_TRUE(CommandBackend("exit 3", {}, 1, dir_).measure(req).failed);
  EXPECT_TRUE(CommandBackend("echo nothing", {}, 1, dir_).measure(req).failed);
  EXPECT_TRUE(CommandBackend("echo 5", {}, 1, dir_).measure(req).failed);  // no trace written
  EXPECT_THROW(CommandBackend(""), InputError);
}

TEST(ElapsedOutput, Formats) {
  EXPECT_EQ(parse_elapsed_output("3.5\n"), 3.5);
  EXPECT_EQ(parse_elapsed_output("log line\nelapsed_sec: 12\n"), 12.0);
  EXPECT_EQ(parse_elapsed_output("elapsed_sec=1\nelapsed_sec=2\r\n"), 2.0);
  EXPECT_EQ(parse_elapsed_output("1\ndone\n"), 1.0);
  EXPECT_FALSE(parse_elapsed_output("no numbers here"));
  EXPECT_FALSE(parse_elapsed_output(""));
}

/// Sleeps a pattern-dependent time so that completion order scrambles.
class SleepyBackend : public MeasurementBackend {
 public:
  Measurement measure(const BackendRequest& r) override {
    ++calls;
    const auto k = r.pattern.count();
    std::this_thread::sleep_for(std::chrono::milliseconds(5 * (4 - k % 4)));
    return constant_power_measurement(1.0 + static_cast<double>(k), 100, {});
  }
  std::string id() const override { return "sleepy"; }
  std::size_t parallelism() const override { return 3; }
  std::atomic<int> calls{0};
};

TEST(MeasureAll, KeepsRequestOrder) {
  const auto model = model_of({loop_json("a"), loop_json("b"), loop_json("c")});
  const auto profile = testing::simple_profile(Device::gpu);
  std::vector<BackendRequest> reqs;
  for (const char* bits : {"000", "100", "110", "111", "010", "011", "001"})
    reqs.push_back({model, OffloadPattern::from_bits(Device::gpu, bits), {}, profile});
  SleepyBackend backend;
  const auto out = measure_all(backend, reqs);
  ASSERT_EQ(out.size(), reqs.size());
  for (std::size_t i = 0; i < reqs.size(); ++i)
    EXPECT_DOUBLE_EQ(out[i].elapsed_sec, 1.0 + static_cast<double>(reqs[i].pattern.count()));
  EXPECT_EQ(backend.calls.load(), 7);
}

}  // namespace
}  // namespace offload
