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

#include "offload/orchestrator.hpp"

#include <charconv>
#include <cmath>

#include "offload/errors.hpp"

namespace offload {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view key, std::string_view text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
    throw InputError("requirement '" + std::string(key) + "' needs a number, got '" + std::string(text) + "'");
  return v;
}

bool usable(const Measurement& m) { return !m.failed && !m.timed_out; }

}  // namespace

bool UserRequirement::satisfied_by(const SearchReport& report) const {
  if (none()) return false;
  const auto& best = report.best;
  if (!usable(best.measurement)) return false;
  if (target_speedup && !(report.time_improvement >= *target_speedup)) return false;
  if (max_energy_watt_sec && !(best.measurement.energy_watt_sec <= *max_energy_watt_sec)) return false;
  if (min_evaluation_value && !(best.value >= *min_evaluation_value)) return false;
  return true;
}

UserRequirement UserRequirement::parse(std::string_view text) {
  UserRequirement r;
  text = trim(text);
  if (text.empty() || text == "none") return r;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InputError("requirement items look like key=value: '" + std::string(item) + "'");
    const auto key = trim(item.substr(0, eq));
    const double v = parse_number(key, trim(item.substr(eq + 1)));
    if (key == "speedup") {
      if (v < 1) throw InputError("speedup requirement must be >= 1");
      r.target_speedup = v;
    } else if (key == "energy") {
      if (!(v > 0)) throw InputError("energy requirement must be positive");
      r.max_energy_watt_sec = v;
    } else if (key == "value") {
      if (!(v > 0)) throw InputError("value requirement must be positive");
      r.min_evaluation_value = v;
    } else {
      throw InputError("unknown requirement '" + std::string(key) + "' (use speedup, energy, value)");
    }
  }
  return r;
}

std::string_view to_string(StopReason reason) noexcept {
  return reason == StopReason::requirement_met ? "requirement_met" : "all_tried";
}

const SearchReport* OrchestrationReport::chosen_report() const {
  if (!chosen) return nullptr;
  for (const auto& t : tried)
    if (t.device == *chosen && t.report) return &*t.report;
  return nullptr;
}

OrchestrationReport orchestrate(const ProgramModel& model, const MachineProfile& profile,
                                MeasurementBackend& backend, const UserRequirement& requirement,
                                const OrchestratorConfig& config, MeasurementCache* cache) {
  const auto devices = profile.offload_devices();
  if (devices.empty()) throw InputError("machine profile has no offload device");
  config.ga.validate();
  config.fpga.validate();

  OrchestrationReport out;
  out.requirement = requirement;
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const Device device = devices[i];
    DestinationOutcome outcome;
    outcome.device = device;
    try {
      outcome.report = device == Device::fpga ? run_fpga_flow(model, profile, backend, config.fpga, cache)
                                              : run_ga(model, profile, backend, device, config.ga, cache);
      outcome.requirement_met = requirement.satisfied_by(*outcome.report);
    } catch (const Error& e) {
      outcome.error = e.what();
    }
    const bool met = outcome.requirement_met;
    out.tried.push_back(std::move(outcome));
    if (met) {
      out.stop_reason = StopReason::requirement_met;
      out.chosen = device;
      for (std::size_t j = i + 1; j < devices.size(); ++j)
        out.skipped.push_back({devices[j], "requirement met by " + std::string(to_string(device))});
      return out;
    }
  }

  out.stop_reason = StopReason::all_tried;
  const DestinationOutcome* best = nullptr;
  for (const auto& t : out.tried) {
    if (!t.report) continue;
    if (!best || is_preferred(t.report->best.measurement, t.report->best.value,
                              best->report->best.measurement, best->report->best.value))
      best = &t;
  }
  if (best) out.chosen = best->device;
  return out;
}

}  // namespace offload
