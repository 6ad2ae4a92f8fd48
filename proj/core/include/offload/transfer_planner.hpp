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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "offload/pattern.hpp"
#include "offload/program_model.hpp"

namespace offload {

enum class TransferDirection { host_to_device, device_to_host };
enum class AnchorPosition { before, after };

std::string_view to_string(TransferDirection direction) noexcept;
std::string_view to_string(AnchorPosition position) noexcept;

/// One whole-variable copy, executed every time control passes the anchor
/// (before entering or after leaving the anchor loop, or once at program
/// start/end when `anchor_loop` is empty).
struct TransferEntry {
  std::string variable;
  TransferDirection direction = TransferDirection::host_to_device;
  std::optional<std::string> anchor_loop;
  AnchorPosition position = AnchorPosition::before;

  friend bool operator==(const TransferEntry&, const TransferEntry&) = default;
};

/// Entries sharing an anchor and position form one batch.
struct TransferPlan {
  std::vector<TransferEntry> entries;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t batch_count() const;
};

/// Hoisted, batched host/device copies for `pattern`.
///
/// Copies to the device are placed before the outermost enclosing loop whose
/// subtree has no CPU write of the variable and at whose entry the host copy
/// is always current; copies back are placed after the outermost enclosing
/// loop whose subtree has no CPU read and at whose exit the device copy is
/// always current. Loops are treated as executing at least twice, so
/// loop-carried uses are covered. Redundant entries are pruned, so every
/// returned entry is needed by some use.
TransferPlan plan_transfers(const ProgramModel& model, const OffloadPattern& pattern);

/// Number of times `entry` executes in one program run: 1 at program top,
/// otherwise the iteration count of the anchor's parent (1 for root loops).
std::uint64_t anchor_executions(const ProgramModel& model, const TransferEntry& entry);

}  // namespace offload
