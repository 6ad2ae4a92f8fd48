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

#include "offload/fpga_flow.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "offload/errors.hpp"
#include "search_common.hpp"

namespace offload {

void FpgaFlowConfig::validate() const {
  if (k < 1) throw InputError("k must be at least 1");
  if (wall_budget_sec && !(*wall_budget_sec > 0)) throw InputError("wall budget must be positive");
}

std::vector<Combination> plan_combinations(const std::vector<double>& values,
                                           const std::vector<double>& resources, double capacity,
                                           std::size_t limit) {
  if (values.size() != resources.size()) throw InputError("values and resources differ in length");
  const std::size_t n = values.size();
  std::vector<Combination> out;
  auto take = [&](std::vector<Combination> group) {
    auto sum = [&](const Combination& c) {
      double s = 0.0;
      for (auto i : c) s += values[i];
      return s;
    };
    std::stable_sort(group.begin(), group.end(),
                     [&](const Combination& a, const Combination& b) { return sum(a) > sum(b); });
    for (auto& c : group) {
      if (out.size() >= limit) return;
      double used = 0.0;
      for (auto i : c) used += resources[i];
      if (used <= capacity) out.push_back(std::move(c));
    }
  };
  std::vector<Combination> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
  take(std::move(pairs));
  std::vector<Combination> triples;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t l = j + 1; l < n; ++l) triples.push_back({i, j, l});
  take(std::move(triples));
  return out;
}

SearchReport run_fpga_flow(const ProgramModel& model, const MachineProfile& profile,
                           MeasurementBackend& backend, const FpgaFlowConfig& config,
                           MeasurementCache* cache) {
  config.validate();
  profile.check_against(model);
  const auto started = std::chrono::steady_clock::now();
  auto over_budget = [&] {
    if (!config.wall_budget_sec) return false;
    const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - started;
    return spent.count() >= *config.wall_budget_sec;
  };

  detail::PatternEvaluator eval(model, profile, backend, Device::fpga, config.exponents, cache);
  const std::size_t n = model.eligible_loops().size();
  const std::size_t baseline = eval.evaluate_one(OffloadPattern::cpu_only(Device::fpga, n));
  const auto candidates = narrow_candidates(model, profile, {config.k, config.min_iterations});

  nlohmann::json cfg = {{"k", config.k},
                        {"min_iterations", config.min_iterations},
                        {"combination_limit", config.combination_limit}};
  cfg["wall_budget_sec"] = config.wall_budget_sec ? nlohmann::json(*config.wall_budget_sec) : nlohmann::json();

  auto finish = [&](std::size_t best, std::vector<GenerationRecord> history, bool exhausted) {
    SearchStatus status = SearchStatus::ok;
    if (n == 0) status = SearchStatus::nothing_to_offload;
    else if (!eval.at(best).pattern.any()) status = SearchStatus::no_offload_found;
    auto report = eval.make_report("fpga-flow", status, baseline, best);
    report.candidates = candidates;
    report.config = cfg;
    report.history = std::move(history);
    report.budget_exhausted = exhausted;
    return report;
  };
  if (candidates.empty()) return finish(baseline, {}, false);

  auto record = [&](std::size_t index, std::size_t evaluated, std::size_t calls_before, std::size_t best) {
    GenerationRecord rec;
    rec.index = index;
    rec.evaluated = evaluated;
    rec.measured = eval.backend_calls() - calls_before;
    rec.best_value = eval.at(best).value;
    rec.best_pattern = eval.at(best).pattern.bits();
    return rec;
  };

  std::vector<GenerationRecord> history;
  std::vector<OffloadPattern> singles;
  for (const auto& c : candidates) {
    auto p = OffloadPattern::cpu_only(Device::fpga, n);
    p.genes[c.gene] = 1;
    singles.push_back(std::move(p));
  }
  std::size_t calls = eval.backend_calls();
  const auto round1 = eval.evaluate(singles);
  std::vector<std::size_t> pool{baseline};
  pool.insert(pool.end(), round1.begin(), round1.end());
  std::size_t best = eval.best_of(pool);
  history.push_back(record(0, singles.size(), calls, best));

  const auto& base = eval.at(baseline);
  std::vector<std::size_t> improvers;
  std::vector<double> values, resources;
  for (std::size_t i = 0; i < round1.size(); ++i) {
    const auto& e = eval.at(round1[i]);
    if (e.measurement.failed || !(e.value > base.value)) continue;
    improvers.push_back(i);
    values.push_back(e.value);
    resources.push_back(candidates[i].resource_fraction);
  }

  const auto combos = plan_combinations(values, resources, profile.fpga_resource_capacity_fraction(),
                                        config.combination_limit);
  if (combos.empty()) return finish(best, std::move(history), false);
  if (over_budget()) return finish(best, std::move(history), true);

  std::vector<OffloadPattern> combined;
  for (const auto& combo : combos) {
    auto p = OffloadPattern::cpu_only(Device::fpga, n);
    for (auto pos : combo) p.genes[candidates[improvers[pos]].gene] = 1;
    combined.push_back(std::move(p));
  }
  calls = eval.backend_calls();
  const auto round2 = eval.evaluate(combined);
  pool.insert(pool.end(), round2.begin(), round2.end());
  best = eval.best_of(pool);
  history.push_back(record(1, combined.size(), calls, best));
  return finish(best, std::move(history), false);
}

}  // namespace offload
