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

#include "offload/report.hpp"

#include <cmath>

#include "json_fields.hpp"

namespace offload {

using nlohmann::json;

std::string_view to_string(SearchStatus status) noexcept {
  switch (status) {
    case SearchStatus::ok: return "ok";
    case SearchStatus::nothing_to_offload: return "nothing_to_offload";
    case SearchStatus::no_offload_found: return "no_offload_found";
  }
  return "ok";
}

bool SearchReport::all_failed() const noexcept {
  if (evaluated.empty()) return false;
  for (const auto& e : evaluated)
    if (!e.measurement.failed) return false;
  return true;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

json to_json(const EvaluatedPattern& e) {
  return {{"pattern", e.pattern.bits()},
          {"placement", e.pattern.placement()},
          {"fingerprint", e.pattern.fingerprint()},
          {"measurement", to_json(e.measurement)},
          {"evaluation_value", e.value},
          {"cached", e.cached}};
}

}  // namespace

json to_json(const Measurement& m, bool with_samples) {
  json j = {{"elapsed_sec", m.elapsed_sec},
            {"energy_watt_sec", m.energy_watt_sec},
            {"mean_watts", m.mean_watts},
            {"timed_out", m.timed_out},
            {"failed", m.failed}};
  if (m.failed) j["error"] = m.error;
  if (with_samples) {
    json samples = json::array();
    for (const auto& s : m.samples) samples.push_back({s.t_sec, s.watts});
    j["samples"] = std::move(samples);
  }
  return j;
}

Measurement measurement_from_json(const json& doc) {
  using namespace detail;
  const std::string path = "measurement";
  require_object(doc, path);
  reject_unknown_keys(doc, path,
                      {"elapsed_sec", "energy_watt_sec", "mean_watts", "timed_out", "failed", "error", "samples"});
  Measurement m;
  m.elapsed_sec = number_field(doc, path, "elapsed_sec");
  m.energy_watt_sec = number_field(doc, path, "energy_watt_sec");
  m.mean_watts = number_field(doc, path, "mean_watts");
  m.timed_out = bool_field(doc, path, "timed_out");
  m.failed = bool_field(doc, path, "failed");
  if (doc.contains("error")) m.error = string_field(doc, path, "error");
  if (doc.contains("samples")) {
    const auto& arr = doc.at("samples");
    if (!arr.is_array()) throw ValidationError(path + ".samples", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto& s = arr[i];
      const auto field = path + ".samples[" + std::to_string(i) + "]";
      if (!s.is_array() || s.size() != 2) throw ValidationError(field, "expected [t_sec, watts]");
      m.samples.push_back({as_number(s[0], field), as_number(s[1], field)});
    }
  }
  return m;
}

json to_json(const TransferPlan& plan) {
  json entries = json::array();
  for (const auto& e : plan.entries)
    entries.push_back({{"variable", e.variable},
                       {"direction", to_string(e.direction)},
                       {"anchor_loop", e.anchor_loop ? json(*e.anchor_loop) : json()},
                       {"position", to_string(e.position)}});
  return entries;
}

json to_json(const CandidateScore& s) {
  return {{"loop_id", s.loop_id},
          {"gene", s.gene},
          {"arithmetic_intensity", finite_or_null(s.arithmetic_intensity)},
          {"degenerate", s.degenerate},
          {"iteration_count", s.iteration_count},
          {"resource_fraction", s.resource_fraction},
          {"passed_resource_check", s.passed_resource_check}};
}

json to_json(const SearchReport& r) {
  json j;
  j["schema"] = kSearchReportSchema;
  j["destination"] = to_string(r.destination);
  j["algorithm"] = r.algorithm;
  j["status"] = to_string(r.status);
  j["seed"] = r.seed;
  j["exponents"] = {{"time", r.exponents.time}, {"power", r.exponents.power}};
  j["baseline"] = to_json(r.baseline);
  j["best"] = to_json(r.best);
  j["best"]["offloaded_loops"] = r.best_offloaded_loops;
  j["transfer_plan"] = to_json(r.transfer_plan);
  j["transfer_batches"] = r.transfer_plan.batch_count();
  j["improvement"] = {{"time", finite_or_null(r.time_improvement)},
                      {"energy", finite_or_null(r.energy_improvement)}};
  json history = json::array();
  for (const auto& h : r.history)
    history.push_back({{"index", h.index},
                       {"evaluated", h.evaluated},
                       {"measured", h.measured},
                       {"best_value", h.best_value},
                       {"best_pattern", h.best_pattern}});
  j["history"] = std::move(history);
  json evaluated = json::array();
  for (const auto& e : r.evaluated) evaluated.push_back(to_json(e));
  j["evaluated"] = std::move(evaluated);
  json candidates = json::array();
  for (const auto& c : r.candidates) candidates.push_back(to_json(c));
  j["candidates"] = std::move(candidates);
  j["backend_calls"] = r.backend_calls;
  j["cache_hits"] = r.cache_hits;
  j["verification_cost_sec"] = r.verification_cost_sec;
  j["budget_exhausted"] = r.budget_exhausted;
  j["config"] = r.config;
  return j;
}

json to_json(const OrchestrationReport& r) {
  json j;
  j["schema"] = kOrchestrationReportSchema;
  const auto& q = r.requirement;
  j["requirement"] = {{"speedup", q.target_speedup ? json(*q.target_speedup) : json()},
                      {"energy_watt_sec", q.max_energy_watt_sec ? json(*q.max_energy_watt_sec) : json()},
                      {"evaluation_value", q.min_evaluation_value ? json(*q.min_evaluation_value) : json()}};
  json tried = json::array();
  for (const auto& t : r.tried) {
    json d = {{"device", to_string(t.device)}, {"requirement_met", t.requirement_met}};
    d["report"] = t.report ? to_json(*t.report) : json();
    if (!t.error.empty()) d["error"] = t.error;
    tried.push_back(std::move(d));
  }
  j["tried"] = std::move(tried);
  json skipped = json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"device", to_string(s.device)}, {"reason", s.reason}});
  j["skipped"] = std::move(skipped);
  j["stop_reason"] = to_string(r.stop_reason);
  if (const auto* chosen = r.chosen_report()) {
    j["chosen"] = {{"device", to_string(*r.chosen)},
                   {"pattern", chosen->best.pattern.bits()},
                   {"offloaded_loops", chosen->best_offloaded_loops},
                   {"evaluation_value", chosen->best.value}};
  } else {
    j["chosen"] = nullptr;
  }
  return j;
}

}  // namespace offload
