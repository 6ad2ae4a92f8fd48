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

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace offload {

struct PowerSample {
  double t_sec = 0.0;
  double watts = 0.0;

  friend bool operator==(const PowerSample&, const PowerSample&) = default;
};

/// When a trial counts as timed out and what elapsed time it is charged.
struct TimeoutPolicy {
  double timeout_sec = 180.0;
  double penalty_sec = 1000.0;
};

/// Exponents of the evaluation value time^time * power^power.
struct FitnessExponents {
  double time = -0.5;
  double power = -0.5;

  friend bool operator==(const FitnessExponents&, const FitnessExponents&) = default;
};

/// Result of running one pattern in the verification environment.
///
/// `energy_watt_sec` is the trapezoidal integral of `samples` over
/// [0, elapsed_sec] and `mean_watts` is energy / elapsed. A failed trial is
/// reported as timed out at the penalty time.
struct Measurement {
  double elapsed_sec = 0.0;
  std::vector<PowerSample> samples;
  double energy_watt_sec = 0.0;
  double mean_watts = 0.0;
  bool timed_out = false;
  bool failed = false;
  std::string error;

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

struct TimeoutOutcome {
  double elapsed_sec = 0.0;
  bool timed_out = false;
};

struct EvaluationValue {
  double value = 0.0;
  FitnessExponents exponents;
};

/// Trapezoidal integral of power over [0, elapsed_sec]. The first and last
/// samples are held constant out to the interval edges. Throws DomainError on
/// an empty trace, non-increasing timestamps, negative watts, or samples
/// outside [0, elapsed_sec].
double integrate_energy(std::span<const PowerSample> samples, double elapsed_sec);

/// Runs strictly longer than `timeout_sec` are charged `penalty_sec`.
TimeoutOutcome apply_timeout(double raw_elapsed_sec, const TimeoutPolicy& policy);

/// elapsed^a * watts^b. Throws DomainError for nonpositive inputs.
double evaluation_value(double elapsed_sec, double mean_watts, const FitnessExponents& exponents = {});
EvaluationValue evaluation_value(const Measurement& m, const FitnessExponents& exponents = {});

/// Builds a measurement from a raw trace. For timed-out runs the mean power
/// observed up to the timeout is held over the penalty time.
Measurement measurement_from_trace(std::vector<PowerSample> samples, double raw_elapsed_sec,
                                   const TimeoutPolicy& policy);

/// Measurement drawing a constant `watts` for `raw_elapsed_sec`.
Measurement constant_power_measurement(double raw_elapsed_sec, double watts,
                                       const TimeoutPolicy& policy);

/// A trial that produced no usable result: penalty time at `idle_watts`.
Measurement failed_measurement(std::string reason, double idle_watts, const TimeoutPolicy& policy);

/// Whether measurement `a` (valued `va`) should be preferred over `b`. Trials
/// that completed beat timed-out or failed ones; otherwise higher value wins.
/// Ties keep `b`.
bool is_preferred(const Measurement& a, double va, const Measurement& b, double vb) noexcept;

/// `t_sec,watts` CSV with a header line.
std::vector<PowerSample> read_power_trace(std::istream& in);
std::vector<PowerSample> read_power_trace(const std::filesystem::path& path);
void write_power_trace(std::ostream& out, std::span<const PowerSample> samples);
void write_power_trace(const std::filesystem::path& path, std::span<const PowerSample> samples);

}  // namespace offload
