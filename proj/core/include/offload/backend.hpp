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

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <semaphore>
#include <span>
#include <string>
#include <vector>

#include "offload/fitness.hpp"
#include "offload/pattern.hpp"
#include "offload/program_model.hpp"
#include "offload/transfer_planner.hpp"

namespace offload {

/// Everything a verification environment needs to run one pattern.
struct BackendRequest {
  const ProgramModel& model;
  OffloadPattern pattern;
  TransferPlan transfer_plan;
  const MachineProfile& profile;
};

enum class PhaseKind { cpu_compute, device_compute, transfer };

std::string_view to_string(PhaseKind kind) noexcept;

struct SimulatedPhase {
  PhaseKind kind = PhaseKind::cpu_compute;
  double duration_sec = 0.0;
  double watts = 0.0;
  /// Loop id, variable name, or "serial".
  std::string label;
};

/// CPU seconds of each loop's own body (indexed like `model.loops()`). Loops
/// with an explicit `cpu_time_sec` keep it; the rest of the baseline is split
/// in proportion to iteration_count * per_iteration_ops.
std::vector<double> cpu_loop_seconds(const ProgramModel& model);

/// Baseline time not attributed to any loop (only nonzero when explicit loop
/// times leave a remainder that no other loop can absorb).
double serial_cpu_seconds(const ProgramModel& model);

/// Sequential whole-server cost model of one run, in program order.
/// Throws ValidationError when the pattern's device is missing from the profile.
std::vector<SimulatedPhase> simulate_phases(const BackendRequest& request);

/// A verification environment. Implementations must tolerate concurrent
/// `measure` calls on distinct requests. Backend-specific failures are
/// returned as failed measurements rather than thrown.
class MeasurementBackend {
 public:
  virtual ~MeasurementBackend() = default;

  virtual Measurement measure(const BackendRequest& request) = 0;
  /// Identifies the backend and its settings for cache keys.
  virtual std::string id() const = 0;
  virtual std::size_t parallelism() const { return 1; }
};

/// Deterministic stand-in for hardware: integrates `simulate_phases`.
class SimulatedBackend final : public MeasurementBackend {
 public:
  explicit SimulatedBackend(TimeoutPolicy policy = {}, std::size_t parallelism = 1)
      : policy_(policy), parallelism_(parallelism == 0 ? 1 : parallelism) {}

  Measurement measure(const BackendRequest& request) override;
  std::string id() const override;
  std::size_t parallelism() const override { return parallelism_; }

 private:
  TimeoutPolicy policy_;
  std::size_t parallelism_;
};

/// Replays recorded runs. The directory holds `index.csv`
/// (`fingerprint,elapsed_sec`) and one `<fingerprint>.csv` power trace per
/// recorded pattern.
class ReplayBackend final : public MeasurementBackend {
 public:
  /// Throws InputError when the index is missing or malformed.
  explicit ReplayBackend(std::filesystem::path directory, TimeoutPolicy policy = {});

  Measurement measure(const BackendRequest& request) override;
  std::string id() const override;
  std::size_t parallelism() const override { return 4; }

  const std::map<std::string, double>& index() const noexcept { return index_; }

 private:
  std::filesystem::path directory_;
  TimeoutPolicy policy_;
  std::map<std::string, double> index_;
};

/// Runs an external command per trial. `{pattern_file}` and `{trace_out}` in
/// the template are replaced by paths; the command must print the elapsed
/// seconds on stdout and write a `t_sec,watts` trace to `{trace_out}`.
/// OFFLOAD_TUNER_TIMEOUT_SEC is exported to the command.
class CommandBackend final : public MeasurementBackend {
 public:
  CommandBackend(std::string command_template, TimeoutPolicy policy = {},
                 std::size_t parallelism = 1, std::filesystem::path work_dir = {});

  Measurement measure(const BackendRequest& request) override;
  std::string id() const override;
  std::size_t parallelism() const override { return parallelism_; }

 private:
  std::string template_;
  TimeoutPolicy policy_;
  std::size_t parallelism_;
  std::filesystem::path work_dir_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
};

/// Measures `requests` using up to `backend.parallelism()` threads; results
/// are in request order.
std::vector<Measurement> measure_all(MeasurementBackend& backend,
                                     std::span<const BackendRequest> requests);

/// Parses the elapsed seconds printed by an external command: the last line
/// that is a bare number or `elapsed_sec=<number>` / `elapsed_sec: <number>`.
std::optional<double> parse_elapsed_output(std::string_view stdout_text);

}  // namespace offload
