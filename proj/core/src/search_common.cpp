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

#include "search_common.hpp"

#include <cmath>

#include "offload/errors.hpp"

namespace offload::detail {

PatternEvaluator::PatternEvaluator(const ProgramModel& model, const MachineProfile& profile,
                                   MeasurementBackend& backend, Device device,
                                   FitnessExponents exponents, MeasurementCache* cache)
    : model_(model),
      profile_(profile),
      backend_(backend),
      device_(device),
      exponents_(exponents),
      cache_(cache),
      backend_id_(backend.id() + ";" + profile.digest()) {
  profile_.at(device_);
}

double PatternEvaluator::score(const Measurement& m) const {
  try {
    return evaluation_value(m, exponents_).value;
  } catch (const DomainError&) {
    if (m.failed || m.timed_out) return 0.0;
    throw;
  }
}

TransferPlan PatternEvaluator::plan_for(const OffloadPattern& pattern) const {
  if (!pattern.any() || profile_.at(pattern.device).shared_memory) return {};
  return plan_transfers(model_, pattern);
}

std::size_t PatternEvaluator::evaluate_one(const OffloadPattern& pattern) {
  return evaluate(std::span(&pattern, 1)).front();
}

std::vector<std::size_t> PatternEvaluator::evaluate(std::span<const OffloadPattern> patterns) {
  std::vector<std::size_t> out(patterns.size());
  std::vector<std::size_t> fresh;
  std::vector<BackendRequest> requests;
  std::vector<std::size_t> request_slots;

  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const auto& pattern = patterns[i];
    check_pattern(model_, pattern);
    if (pattern.device != device_)
      throw InputError("pattern for " + std::string(to_string(pattern.device)) +
                       " evaluated while searching " + std::string(to_string(device_)));
    const auto fp = pattern.fingerprint();
    if (auto it = by_fingerprint_.find(fp); it != by_fingerprint_.end()) {
      out[i] = it->second;
      continue;
    }
    const std::size_t slot = evaluated_.size();
    by_fingerprint_.emplace(fp, slot);
    out[i] = slot;
    fresh.push_back(slot);

    EvaluatedPattern entry;
    entry.pattern = pattern;
    if (cache_) {
      if (auto hit = cache_->lookup(make_cache_key(model_.digest(), pattern, backend_id_))) {
        entry.measurement = std::move(*hit);
        entry.cached = true;
      }
    }
    evaluated_.push_back(std::move(entry));
    if (!evaluated_.back().cached) {
      requests.push_back(BackendRequest{model_, pattern, plan_for(pattern), profile_});
      request_slots.push_back(slot);
    }
  }

  if (!requests.empty()) {
    auto results = measure_all(backend_, requests);
    backend_calls_ += requests.size();
    for (std::size_t r = 0; r < results.size(); ++r) {
      auto& entry = evaluated_[request_slots[r]];
      entry.measurement = std::move(results[r]);
      if (cache_ && !entry.measurement.failed)
        cache_->insert(make_cache_key(model_.digest(), entry.pattern, backend_id_), entry.measurement);
    }
  }

  const double compile_cost = profile_.at(device_).compile_cost_sec;
  for (auto slot : fresh) {
    auto& entry = evaluated_[slot];
    entry.value = score(entry.measurement);
    if (entry.cached) {
      ++cache_hits_;
    } else {
      verification_cost_ += entry.measurement.elapsed_sec + (entry.pattern.any() ? compile_cost : 0.0);
    }
  }
  return out;
}

std::size_t PatternEvaluator::best_of(std::span<const std::size_t> indices) const {
  if (indices.empty()) throw InputError("no evaluated patterns to choose from");
  std::size_t best = indices.front();
  for (auto i : indices.subspan(1)) {
    const auto& c = evaluated_.at(i);
    const auto& b = evaluated_.at(best);
    if (is_preferred(c.measurement, c.value, b.measurement, b.value)) best = i;
  }
  return best;
}

std::size_t PatternEvaluator::best_overall() const {
  std::vector<std::size_t> all(evaluated_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return best_of(all);
}

SearchReport PatternEvaluator::make_report(std::string algorithm, SearchStatus status,
                                           std::size_t baseline, std::size_t best) const {
  SearchReport report;
  report.destination = device_;
  report.algorithm = std::move(algorithm);
  report.status = status;
  report.exponents = exponents_;
  report.baseline = evaluated_.at(baseline);
  report.best = evaluated_.at(best);
  report.best_offloaded_loops = offloaded_loop_ids(model_, report.best.pattern);
  report.transfer_plan = plan_for(report.best.pattern);
  const auto& bm = report.baseline.measurement;
  const auto& tm = report.best.measurement;
  report.time_improvement = tm.elapsed_sec > 0 ? bm.elapsed_sec / tm.elapsed_sec : 0.0;
  report.energy_improvement = tm.energy_watt_sec > 0 ? bm.energy_watt_sec / tm.energy_watt_sec : 0.0;
  report.evaluated = evaluated_;
  report.backend_calls = backend_calls_;
  report.cache_hits = cache_hits_;
  report.verification_cost_sec = verification_cost_;
  return report;
}

}  // namespace offload::detail
