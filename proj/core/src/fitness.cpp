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

#include "offload/fitness.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "offload/errors.hpp"

namespace offload {

namespace {

void check_policy(const TimeoutPolicy& policy) {
  if (!(policy.timeout_sec > 0) || !(policy.penalty_sec > 0))
    throw DomainError("timeout and penalty times must be positive");
}

Measurement from_energy(double raw_elapsed, double raw_energy, const TimeoutPolicy& policy) {
  const auto outcome = apply_timeout(raw_elapsed, policy);
  const double mean = raw_energy / raw_elapsed;
  Measurement m;
  m.elapsed_sec = outcome.elapsed_sec;
  m.timed_out = outcome.timed_out;
  m.energy_watt_sec = outcome.timed_out ? mean * outcome.elapsed_sec : raw_energy;
  m.mean_watts = m.energy_watt_sec / m.elapsed_sec;
  m.samples = {{0.0, m.mean_watts}, {m.elapsed_sec, m.mean_watts}};
  return m;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

}  // namespace

double integrate_energy(std::span<const PowerSample> samples, double elapsed_sec) {
  if (samples.empty()) throw DomainError("power trace has no samples");
  if (!(elapsed_sec > 0) || !std::isfinite(elapsed_sec))
    throw DomainError("elapsed time must be positive");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!(s.watts >= 0) || !std::isfinite(s.watts))
      throw DomainError("power sample " + std::to_string(i) + " has negative or non-finite watts");
    if (!(s.t_sec >= 0) || s.t_sec > elapsed_sec)
      throw DomainError("power sample " + std::to_string(i) + " lies outside [0, elapsed]");
    if (i > 0 && !(s.t_sec > samples[i - 1].t_sec))
      throw DomainError("power sample timestamps must be strictly increasing (sample " +
                        std::to_string(i) + ")");
  }
  double energy = samples.front().watts * samples.front().t_sec;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto& a = samples[i - 1];
    const auto& b = samples[i];
    energy += 0.5 * (a.watts + b.watts) * (b.t_sec - a.t_sec);
  }
  energy += samples.back().watts * (elapsed_sec - samples.back().t_sec);
  return energy;
}

TimeoutOutcome apply_timeout(double raw_elapsed_sec, const TimeoutPolicy& policy) {
  if (raw_elapsed_sec > policy.timeout_sec) return {policy.penalty_sec, true};
  return {raw_elapsed_sec, false};
}

double evaluation_value(double elapsed_sec, double mean_watts, const FitnessExponents& exponents) {
  if (!(elapsed_sec > 0) || !std::isfinite(elapsed_sec))
    throw DomainError("evaluation value needs a positive processing time");
  if (!(mean_watts > 0) || !std::isfinite(mean_watts))
    throw DomainError("evaluation value needs a positive power consumption");
  return std::pow(elapsed_sec, exponents.time) * std::pow(mean_watts, exponents.power);
}

EvaluationValue evaluation_value(const Measurement& m, const FitnessExponents& exponents) {
  return {evaluation_value(m.elapsed_sec, m.mean_watts, exponents), exponents};
}

Measurement measurement_from_trace(std::vector<PowerSample> samples, double raw_elapsed_sec,
                                   const TimeoutPolicy& policy) {
  check_policy(policy);
  if (!(raw_elapsed_sec > 0)) throw DomainError("elapsed time must be positive");
  const auto outcome = apply_timeout(raw_elapsed_sec, policy);
  if (!outcome.timed_out) {
    Measurement m;
    m.elapsed_sec = raw_elapsed_sec;
    m.energy_watt_sec = integrate_energy(samples, raw_elapsed_sec);
    m.mean_watts = m.energy_watt_sec / raw_elapsed_sec;
    m.samples = std::move(samples);
    return m;
  }
  // Only the part of the trace before the kill was observed.
  std::vector<PowerSample> observed;
  for (const auto& s : samples)
    if (s.t_sec <= policy.timeout_sec) observed.push_back(s);
  if (observed.empty()) {
    if (samples.empty()) throw DomainError("power trace has no samples");
    observed.push_back({0.0, samples.front().watts});
  }
  const double observed_energy = integrate_energy(observed, policy.timeout_sec);
  const double observed_mean = observed_energy / policy.timeout_sec;
  return from_energy(raw_elapsed_sec, observed_mean * raw_elapsed_sec, policy);
}

Measurement constant_power_measurement(double raw_elapsed_sec, double watts,
                                       const TimeoutPolicy& policy) {
  check_policy(policy);
  if (!(raw_elapsed_sec > 0)) throw DomainError("elapsed time must be positive");
  if (!(watts >= 0)) throw DomainError("watts must be >= 0");
  return from_energy(raw_elapsed_sec, watts * raw_elapsed_sec, policy);
}

Measurement failed_measurement(std::string reason, double idle_watts, const TimeoutPolicy& policy) {
  check_policy(policy);
  Measurement m;
  m.elapsed_sec = policy.penalty_sec;
  m.mean_watts = idle_watts;
  m.energy_watt_sec = idle_watts * policy.penalty_sec;
  m.samples = {{0.0, idle_watts}, {policy.penalty_sec, idle_watts}};
  m.timed_out = true;
  m.failed = true;
  m.error = std::move(reason);
  return m;
}

bool is_preferred(const Measurement& a, double va, const Measurement& b, double vb) noexcept {
  const bool a_done = !a.timed_out && !a.failed;
  const bool b_done = !b.timed_out && !b.failed;
  if (a_done != b_done) return a_done;
  return va > vb;
}

std::vector<PowerSample> read_power_trace(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::vector<PowerSample> out;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (lineno == 1 && view.size() >= 3 && static_cast<unsigned char>(view[0]) == 0xEF)
      view.remove_prefix(3);  // UTF-8 BOM
    if (view.empty()) continue;
    if (!header_seen) {
      if (view != "t_sec,watts")
        throw ParseError("power trace line " + std::to_string(lineno) +
                         ": expected header 't_sec,watts'");
      header_seen = true;
      continue;
    }
    auto comma = view.find(',');
    PowerSample s;
    if (comma == std::string_view::npos || !parse_double(view.substr(0, comma), s.t_sec) ||
        !parse_double(view.substr(comma + 1), s.watts))
      throw ParseError("power trace line " + std::to_string(lineno) + ": expected 't_sec,watts'");
    out.push_back(s);
  }
  if (!header_seen) throw ParseError("power trace is empty");
  return out;
}

std::vector<PowerSample> read_power_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("power trace not readable: " + path.string());
  return read_power_trace(in);
}

void write_power_trace(std::ostream& out, std::span<const PowerSample> samples) {
  out << "t_sec,watts\n";
  for (const auto& s : samples) out << format_double(s.t_sec) << ',' << format_double(s.watts) << '\n';
}

void write_power_trace(const std::filesystem::path& path, std::span<const PowerSample> samples) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write power trace: " + path.string());
  write_power_trace(out, samples);
}

}  // namespace offload
