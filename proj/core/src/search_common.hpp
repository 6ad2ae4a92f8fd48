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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "offload/backend.hpp"
#include "offload/cache.hpp"
#include "offload/search_report.hpp"

namespace offload::detail {

/// Measures and scores patterns for one destination, measuring each distinct
/// placement at most once.
class PatternEvaluator {
 public:
  PatternEvaluator(const ProgramModel& model, const MachineProfile& profile, MeasurementBackend& backend,
                   Device device, FitnessExponents exponents, MeasurementCache* cache);

  /// Indices into `evaluated()`, one per input pattern.
  std::vector<std::size_t> evaluate(std::span<const OffloadPattern> patterns);
  std::size_t evaluate_one(const OffloadPattern& pattern);

  const EvaluatedPattern& at(std::size_t index) const { return evaluated_.at(index); }
  const std::vector<EvaluatedPattern>& evaluated() const noexcept { return evaluated_; }
  std::size_t backend_calls() const noexcept { return backend_calls_; }
  std::size_t cache_hits() const noexcept { return cache_hits_; }

  TransferPlan plan_for(const OffloadPattern& pattern) const;

  /// Preferred entry among `indices`; earlier entries win ties.
  std::size_t best_of(std::span<const std::size_t> indices) const;
  std::size_t best_overall() const;

  SearchReport make_report(std::string algorithm, SearchStatus status, std::size_t baseline,
                           std::size_t best) const;

 private:
  double score(const Measurement& m) const;

  const ProgramModel& model_;
  const MachineProfile& profile_;
  MeasurementBackend& backend_;
  Device device_;
  FitnessExponents exponents_;
  MeasurementCache* cache_;
  std::string backend_id_;

  std::vector<EvaluatedPattern> evaluated_;
  std::map<std::string, std::size_t> by_fingerprint_;
  std::size_t backend_calls_ = 0;
  std::size_t cache_hits_ = 0;
  double verification_cost_ = 0.0;
};

}  // namespace offload::detail
