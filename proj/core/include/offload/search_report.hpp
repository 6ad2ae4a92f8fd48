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

#include "json.hpp"
#include "offload/analysis.hpp"
#include "offload/fitness.hpp"
#include "offload/pattern.hpp"
#include "offload/transfer_planner.hpp"

namespace offload {

enum class SearchStatus { ok, nothing_to_offload, no_offload_found };

std::string_view to_string(SearchStatus status) noexcept;

struct EvaluatedPattern {
  OffloadPattern pattern;
  Measurement measurement;
  double value = 0.0;
  /// Served from a persisted measurement cache instead of the backend.
  bool cached = false;
};

struct GenerationRecord {
  std::size_t index = 0;
  std::size_t evaluated = 0;
  /// Backend calls made while evaluating this generation.
  std::size_t measured = 0;
  double best_value = 0.0;
  std::string best_pattern;
};

/// Outcome of searching one destination device.
struct SearchReport {
  Device destination = Device::gpu;
  std::string algorithm;
  SearchStatus status = SearchStatus::ok;
  std::uint64_t seed = 0;
  FitnessExponents exponents;

  EvaluatedPattern baseline;
  EvaluatedPattern best;
  std::vector<std::string> best_offloaded_loops;
  TransferPlan transfer_plan;

  /// baseline.elapsed / best.elapsed
  double time_improvement = 0.0;
  /// baseline.energy / best.energy
  double energy_improvement = 0.0;

  std::vector<GenerationRecord> history;
  /// Every distinct pattern evaluated, in first-evaluation order.
  std::vector<EvaluatedPattern> evaluated;
  std::vector<CandidateScore> candidates;

  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
  /// Sum of trial times plus per-trial device preparation cost.
  double verification_cost_sec = 0.0;
  bool budget_exhausted = false;

  nlohmann::json config = nlohmann::json::object();

  /// True when no evaluated pattern produced a usable measurement.
  bool all_failed() const noexcept;
};

}  // namespace offload
