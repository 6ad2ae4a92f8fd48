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
#include <string>
#include <string_view>
#include <vector>

#include "offload/program_model.hpp"

namespace offload {

/// Device placement of every offload-eligible loop: gene i corresponds to
/// `model.eligible_loops()[i]`; 1 runs the loop on `device`, 0 on the CPU.
struct OffloadPattern {
  Device device = Device::gpu;
  std::vector<std::uint8_t> genes;

  static OffloadPattern cpu_only(Device device, std::size_t gene_count);
  /// Parses a string of '0'/'1'. Throws InputError.
  static OffloadPattern from_bits(Device device, std::string_view bits);

  std::size_t size() const noexcept { return genes.size(); }
  bool any() const noexcept;
  std::size_t count() const noexcept;

  /// "0101..." rendering of the genes.
  std::string bits() const;
  /// Per-gene placement characters: 'c' for CPU, otherwise the device letter
  /// ('m' many-core CPU, 'g' GPU, 'f' FPGA). The all-CPU pattern renders the
  /// same for every device.
  std::string placement() const;
  /// Hex digest of `placement()`; names replay traces and keys caches.
  std::string fingerprint() const;

  friend bool operator==(const OffloadPattern&, const OffloadPattern&) = default;
};

/// Checks gene count against the model; throws InputError on mismatch.
void check_pattern(const ProgramModel& model, const OffloadPattern& pattern);

/// Effective placement per loop (indexed like `model.loops()`): a loop runs
/// on the device when its own gene is set or any enclosing loop runs there.
std::vector<bool> device_placement(const ProgramModel& model, const OffloadPattern& pattern);

/// Ids of loops whose gene is set, in document order.
std::vector<std::string> offloaded_loop_ids(const ProgramModel& model,
                                            const OffloadPattern& pattern);

}  // namespace offload
