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

#include "offload/analysis.hpp"

#include <algorithm>
#include <limits>

#include "offload/errors.hpp"

namespace offload {

double arithmetic_intensity(const LoopStatement& loop) noexcept {
  if (loop.bytes_accessed <= 0) return std::numeric_limits<double>::infinity();
  return loop.per_iteration_ops * static_cast<double>(loop.iteration_count) / loop.bytes_accessed;
}

std::vector<CandidateScore> score_loops(const ProgramModel& model, const MachineProfile& profile) {
  const double capacity = profile.fpga_resource_capacity_fraction();
  std::vector<CandidateScore> scores;
  const auto eligible = model.eligible_loops();
  for (std::size_t g = 0; g < eligible.size(); ++g) {
    const auto& loop = model.loop(eligible[g]);
    CandidateScore s;
    s.loop_id = loop.id;
    s.loop_index = eligible[g];
    s.gene = g;
    s.arithmetic_intensity = arithmetic_intensity(loop);
    s.degenerate = loop.bytes_accessed <= 0;
    s.iteration_count = loop.iteration_count;
    s.resource_fraction = loop.fpga_resource_estimate;
    s.passed_resource_check = loop.fpga_resource_estimate <= capacity;
    scores.push_back(std::move(s));
  }
  return scores;
}

std::vector<CandidateScore> narrow_candidates(const ProgramModel& model, const MachineProfile& profile,
                                              const NarrowingConfig& config) {
  if (config.k == 0) throw InputError("candidate count k must be at least 1");
  auto scores = score_loops(model, profile);
  std::stable_sort(scores.begin(), scores.end(), [](const CandidateScore& a, const CandidateScore& b) {
    return a.arithmetic_intensity > b.arithmetic_intensity;
  });
  std::vector<CandidateScore> out;
  for (auto& s : scores) {
    if (s.iteration_count < config.min_iterations || !s.passed_resource_check) continue;
    out.push_back(std::move(s));
    if (out.size() == config.k) break;
  }
  return out;
}

}  // namespace offload
