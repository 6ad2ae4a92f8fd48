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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "offload/fpga_flow.hpp"
#include "offload/ga_search.hpp"
#include "offload/search_report.hpp"

namespace offload {

/// What counts as good enough to stop trying further destinations.
struct UserRequirement {
  /// Baseline elapsed / best elapsed must reach this (>= 1).
  std::optional<double> target_speedup;
  std::optional<double> max_energy_watt_sec;
  std::optional<double> min_evaluation_value;

  bool none() const noexcept {
    return !target_speedup && !max_energy_watt_sec && !min_evaluation_value;
  }
  bool satisfied_by(const SearchReport& report) const;

  /// "speedup=X", "energy=Y", "value=Z", comma-separated, or "none".
  /// Throws InputError.
  static UserRequirement parse(std::string_view text);
};

enum class StopReason { requirement_met, all_tried };

std::string_view to_string(StopReason reason) noexcept;

struct DestinationOutcome {
  Device device = Device::gpu;
  std::optional<SearchReport> report;
  /// Set when the destination's search failed.
  std::string error;
  bool requirement_met = false;
};

struct SkippedDestination {
  Device device = Device::gpu;
  std::string reason;
};

struct OrchestrationReport {
  UserRequirement requirement;
  std::vector<DestinationOutcome> tried;
  std::vector<SkippedDestination> skipped;
  std::optional<Device> chosen;
  StopReason stop_reason = StopReason::all_tried;

  const SearchReport* chosen_report() const;
};

struct OrchestratorConfig {
  GaConfig ga;
  FpgaFlowConfig fpga;
};

/// Tries many-core CPU, GPU, then FPGA (those present in the profile) and
/// stops once a destination's best pattern meets `requirement`. Throws
/// InputError when the profile has no offload device.
OrchestrationReport orchestrate(const ProgramModel& model, const MachineProfile& profile,
                                MeasurementBackend& backend, const UserRequirement& requirement,
                                const OrchestratorConfig& config, MeasurementCache* cache = nullptr);

}  // namespace offload
