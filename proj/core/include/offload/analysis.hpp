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
#include <vector>

#include "offload/program_model.hpp"

namespace offload {

/// Total arithmetic operations per unique byte touched. A loop touching no
/// bytes has infinite intensity; `CandidateScore::degenerate` flags it.
double arithmetic_intensity(const LoopStatement& loop) noexcept;

struct CandidateScore {
  std::string loop_id;
  std::size_t loop_index = 0;
  /// Position of the loop in the gene vector.
  std::size_t gene = 0;
  double arithmetic_intensity = 0.0;
  bool degenerate = false;
  std::uint64_t iteration_count = 0;
  double resource_fraction = 0.0;
  bool passed_resource_check = false;
};

struct NarrowingConfig {
  std::size_t k = 4;
  std::uint64_t min_iterations = 1000;
};

/// Scores for every offload-eligible loop, in document order.
std::vector<CandidateScore> score_loops(const ProgramModel& model, const MachineProfile& profile);

/// FPGA candidate narrowing: eligible loops ranked by descending arithmetic
/// intensity (document order breaks ties), minus loops below
/// `min_iterations` and loops whose resource estimate exceeds the profile's
/// FPGA capacity, truncated to the first `k`. Throws InputError when k == 0.
std::vector<CandidateScore> narrow_candidates(const ProgramModel& model, const MachineProfile& profile,
                                              const NarrowingConfig& config = {});

}  // namespace offload
