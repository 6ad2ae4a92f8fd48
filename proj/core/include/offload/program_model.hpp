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
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace offload {

enum class Device { cpu, manycore_cpu, gpu, fpga };

std::string_view to_string(Device device) noexcept;
std::optional<Device> parse_device(std::string_view text) noexcept;

enum class AccessKind { read, write };

std::string_view to_string(AccessKind kind) noexcept;

/// One loop statement of the application. Quantities are profiled inputs.
struct LoopStatement {
  std::string id;
  std::optional<std::string> parent;
  bool parallelizable = false;
  std::uint64_t iteration_count = 0;
  double per_iteration_ops = 0.0;
  /// Unique bytes touched over one full execution of the loop.
  double bytes_accessed = 0.0;
  /// Fraction of FPGA logic (flip flops / lookup tables) if synthesized alone.
  double fpga_resource_estimate = 0.0;
  /// Optional measured CPU time of this loop's own body; overrides the
  /// work-proportional split of the baseline.
  std::optional<double> cpu_time_sec;
};

struct VariableAccess {
  std::string loop_id;
  AccessKind kind = AccessKind::read;
};

/// A named array. `accesses` lists use sites in program order.
struct Variable {
  std::string name;
  std::uint64_t size_bytes = 0;
  std::vector<VariableAccess> accesses;
};

struct ResolvedAccess {
  std::size_t loop = 0;
  AccessKind kind = AccessKind::read;
};

/// Validated, indexed, immutable application model. Loops form a forest; the
/// document order of `loops` defines sibling order and gene positions.
class ProgramModel {
 public:
  /// Throws ValidationError naming the offending field.
  ProgramModel(std::vector<LoopStatement> loops, std::vector<Variable> variables,
               double baseline_cpu_time_sec, std::string name = {});

  const std::string& name() const noexcept { return name_; }
  double baseline_cpu_time_sec() const noexcept { return baseline_cpu_time_sec_; }

  const std::vector<LoopStatement>& loops() const noexcept { return loops_; }
  const LoopStatement& loop(std::size_t index) const { return loops_.at(index); }
  std::size_t loop_count() const noexcept { return loops_.size(); }

  std::optional<std::size_t> find_loop(std::string_view id) const;
  std::optional<std::size_t> parent_of(std::size_t index) const { return parents_.at(index); }
  std::span<const std::size_t> children_of(std::size_t index) const { return children_.at(index); }
  std::span<const std::size_t> roots() const noexcept { return roots_; }
  /// Depth-first, document-ordered traversal of the forest.
  std::span<const std::size_t> preorder() const noexcept { return preorder_; }
  std::size_t preorder_rank(std::size_t index) const { return preorder_rank_.at(index); }
  std::size_t depth(std::size_t index) const { return depth_.at(index); }
  bool is_ancestor_or_self(std::size_t ancestor, std::size_t index) const;

  /// Indices of parallelizable loops in document order (gene positions).
  std::span<const std::size_t> eligible_loops() const noexcept { return eligible_; }

  const std::vector<Variable>& variables() const noexcept { return variables_; }
  std::span<const ResolvedAccess> accesses_of(std::size_t variable) const {
    return resolved_.at(variable);
  }

  /// Stable hex digest of the canonical serialization.
  const std::string& digest() const noexcept { return digest_; }

 private:
  void index_loops();
  void validate_variables();

  std::string name_;
  std::vector<LoopStatement> loops_;
  std::vector<Variable> variables_;
  double baseline_cpu_time_sec_ = 0.0;

  std::vector<std::optional<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> roots_;
  std::vector<std::size_t> preorder_;
  std::vector<std::size_t> preorder_rank_;
  std::vector<std::size_t> subtree_end_;  // preorder rank one past the subtree
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> eligible_;
  std::vector<std::vector<ResolvedAccess>> resolved_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  std::string digest_;
};

/// Ids of loops with `parallelizable == true`, in document order.
std::vector<std::string> parallelizable_loops(const ProgramModel& model);

ProgramModel model_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ProgramModel& model);
ProgramModel parse_model(std::string_view text);
ProgramModel load_model(const std::filesystem::path& path);
void save_model(const ProgramModel& model, const std::filesystem::path& path);

/// Power and speed characteristics of one execution resource.
struct DeviceProfile {
  double idle_watts = 0.0;
  double active_watts = 0.0;
  double default_speedup = 1.0;
  std::map<std::string, double, std::less<>> speedups;
  double transfer_bandwidth_bytes_per_sec = 1.0;
  double transfer_latency_sec = 0.0;
  /// Fixed per-measurement preparation cost (FPGA bitstream compile). Only
  /// used for reporting the verification budget.
  double compile_cost_sec = 0.0;
  /// Device shares host memory (many-core CPU); no transfers are planned.
  bool shared_memory = false;

  double speedup_for(std::string_view loop_id) const;
};

class MachineProfile {
 public:
  MachineProfile() = default;
  /// Throws ValidationError. `cpu` must be present.
  MachineProfile(std::map<Device, DeviceProfile> devices, double fpga_resource_capacity_fraction = 0.8);

  bool has(Device device) const { return devices_.contains(device); }
  const DeviceProfile& at(Device device) const;
  const std::map<Device, DeviceProfile>& devices() const noexcept { return devices_; }
  double fpga_resource_capacity_fraction() const noexcept { return fpga_capacity_; }

  /// Offload destinations present, in the mixed-environment trial order.
  std::vector<Device> offload_devices() const;

  /// Rejects per-loop speedups that name loops absent from `model`.
  void check_against(const ProgramModel& model) const;

  const std::string& digest() const noexcept { return digest_; }

 private:
  std::map<Device, DeviceProfile> devices_;
  double fpga_capacity_ = 0.8;
  std::string digest_;
};

MachineProfile profile_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const MachineProfile& profile);
MachineProfile parse_profile(std::string_view text);
MachineProfile load_profile(const std::filesystem::path& path);

}  // namespace offload
