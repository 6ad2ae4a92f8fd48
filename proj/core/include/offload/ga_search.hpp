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
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "offload/backend.hpp"
#include "offload/cache.hpp"
#include "offload/fitness.hpp"
#include "offload/search_report.hpp"

namespace offload {

using Genes = std::vector<std::uint8_t>;

/// Simple generational GA settings. Defaults are textbook values.
struct GaConfig {
  std::size_t population_size = 20;
  std::size_t generations = 20;
  /// Probability of single-point crossover per parent pair.
  double crossover_rate = 0.9;
  /// Per-gene bit-flip probability.
  double mutation_rate = 0.05;
  std::size_t elitism_count = 1;
  std::uint64_t rng_seed = 1;
  FitnessExponents exponents;
  /// Stop between generations once this much wall time has passed.
  std::optional<double> wall_budget_sec;
  std::function<void(const GenerationRecord&)> on_generation;

  /// Throws InputError.
  void validate() const;
};

/// Seeded generator with portable draws (no std distributions).
class GaRng {
 public:
  explicit GaRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in [0, n); n > 0.
  std::size_t below(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

struct ParentSelection {
  /// Indices copied unchanged into the next generation.
  std::vector<std::size_t> elites;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

/// Fitness-proportional draw of one index.
std::size_t roulette_pick(std::span<const double> fitness, GaRng& rng);

/// Elites are the `elitism_count` fittest individuals (lower index wins ties);
/// the remaining slots are filled by roulette-selected parent pairs.
ParentSelection select_parents(std::span<const double> fitness, std::size_t elitism_count, GaRng& rng);

std::pair<Genes, Genes> single_point_crossover(const Genes& a, const Genes& b, std::size_t cut);

/// Crossover with `crossover_rate` at a uniform cut in [1, n-1], then
/// independent per-gene flips with `mutation_rate`.
std::pair<Genes, Genes> crossover_mutate(const Genes& a, const Genes& b, const GaConfig& config,
                                         GaRng& rng);

/// Searches offload patterns for `device` with a GA maximizing the evaluation
/// value. The CPU-only pattern is always part of the first generation; the
/// best pattern over every measured individual is reported. Patterns are
/// measured at most once per run (and never when present in `cache`).
SearchReport run_ga(const ProgramModel& model, const MachineProfile& profile,
                    MeasurementBackend& backend, Device device, const GaConfig& config,
                    MeasurementCache* cache = nullptr);

}  // namespace offload
