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
#include <optional>
#include <vector>

#include "offload/analysis.hpp"
#include "offload/backend.hpp"
#include "offload/cache.hpp"
#include "offload/search_report.hpp"

namespace offload {

struct FpgaFlowConfig {
  std::size_t k = 4;
  std::uint64_t min_iterations = 1000;
  /// Maximum number of combination patterns measured in the second round.
  std::size_t combination_limit = 6;
  FitnessExponents exponents;
  std::optional<double> wall_budget_sec;

  void validate() const;
};

/// A second-round combination, as positions into the improver list.
using Combination = std::vector<std::size_t>;

/// Pairs, then triples, of improvers. Within each size, combinations are
/// ordered by descending sum of first-round values. Combinations whose summed
/// resource fraction exceeds `capacity` are skipped; at most `limit` are kept.
std::vector<Combination> plan_combinations(const std::vector<double>& values,
                                           const std::vector<double>& resources, double capacity,
                                           std::size_t limit);

/// Two-round FPGA procedure: narrowed candidates measured alone, then
/// combinations of those that beat the CPU-only baseline; the best pattern
/// over baseline and both rounds wins.
SearchReport run_fpga_flow(const ProgramModel& model, const MachineProfile& profile,
                           MeasurementBackend& backend, const FpgaFlowConfig& config,
                           MeasurementCache* cache = nullptr);

}  // namespace offload
