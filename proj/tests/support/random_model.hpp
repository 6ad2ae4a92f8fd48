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

// Random program models and profiles for property tests.

#include <cstddef>
#include <cstdint>
#include <random>

#include "offload/pattern.hpp"
#include "offload/program_model.hpp"

namespace offload::testing {

struct RandomModelOptions {
  std::size_t min_loops = 2;
  std::size_t max_loops = 8;
  std::size_t max_depth = 3;
  std::size_t min_variables = 1;
  std::size_t max_variables = 3;
  double parallelizable_probability = 0.7;
  /// When set, exactly this many loops are parallelizable (needs enough loops).
  std::size_t exact_eligible = 0;
  std::uint64_t min_iterations = 2;
  std::uint64_t max_iterations = 5;
  /// Chance that a loop uses a given variable at all.
  double use_probability = 0.5;
  double baseline_cpu_time_sec = 10.0;
};

ProgramModel random_model(std::mt19937_64& rng, const RandomModelOptions& options = {});

/// CPU plus one offload device with per-loop speedups drawn log-uniformly
/// from [min_speedup, max_speedup].
MachineProfile random_profile(std::mt19937_64& rng, const ProgramModel& model, Device device,
                              double min_speedup = 0.3, double max_speedup = 20.0);

OffloadPattern random_pattern(std::mt19937_64& rng, const ProgramModel& model, Device device,
                              double density = 0.5);

}  // namespace offload::testing
