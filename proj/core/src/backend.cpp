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

#include "offload/backend.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include "offload/errors.hpp"

namespace offload {

std::string_view to_string(PhaseKind kind) noexcept {
  switch (kind) {
    case PhaseKind::cpu_compute: return "cpu_compute";
    case PhaseKind::device_compute: return "device_compute";
    case PhaseKind::transfer: return "transfer";
  }
  return "unknown";
}

namespace {

std::string tag(const TimeoutPolicy& p) {
  std::ostringstream ss;
  ss.precision(17);
  ss << "timeout=" << p.timeout_sec << ",penalty=" << p.penalty_sec;
  return ss.str();
}

double idle_watts_for(const BackendRequest& r) {
  if (r.profile.has(r.pattern.device)) return r.profile.at(r.pattern.device).idle_watts;
  return r.profile.has(Device::cpu) ? r.profile.at(Device::cpu).idle_watts : 0.0;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

void replace_all(std::string& s, std::string_view what, const std::string& with) {
  for (auto pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + with.size()))
    s.replace(pos, what.size(), with);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Cost model

std::vector<double> cpu_loop_seconds(const ProgramModel& model) {
  const auto& loops = model.loops();
  std::vector<double> t(loops.size(), 0.0);
  double explicit_total = 0.0;
  double weight_total = 0.0;
  std::size_t implicit_count = 0;
  for (const auto& l : loops) {
    if (l.cpu_time_sec) {
      explicit_total += *l.cpu_time_sec;
    } else {
      weight_total += static_cast<double>(l.iteration_count) * l.per_iteration_ops;
      ++implicit_count;
    }
  }
  const double remainder = std::max(0.0, model.baseline_cpu_time_sec() - explicit_total);
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const auto& l = loops[i];
    if (l.cpu_time_sec) {
      t[i] = *l.cpu_time_sec;
    } else if (weight_total > 0) {
      t[i] = remainder * (static_cast<double>(l.iteration_count) * l.per_iteration_ops) / weight_total;
    } else if (implicit_count == loops.size()) {
      t[i] = remainder / static_cast<double>(loops.size());
    }
  }
  return t;
}

double serial_cpu_seconds(const ProgramModel& model) {
  const auto t = cpu_loop_seconds(model);
  double sum = 0.0;
  for (double x : t) sum += x;
  const double rest = model.baseline_cpu_time_sec() - sum;
  // Work-proportional splits sum to the baseline up to rounding.
  return rest > 1e-12 * model.baseline_cpu_time_sec() ? rest : 0.0;
}

std::vector<SimulatedPhase> simulate_phases(const BackendRequest& request) {
  const auto& model = request.model;
  const auto placed = device_placement(model, request.pattern);
  const auto& cpu = request.profile.at(Device::cpu);
  const DeviceProfile* device = nullptr;
  if (request.pattern.any() || !request.transfer_plan.empty())
    device = &request.profile.at(request.pattern.device);

  const auto cpu_time = cpu_loop_seconds(model);
  std::vector<SimulatedPhase> phases;

  std::map<std::pair<std::optional<std::size_t>, AnchorPosition>, std::vector<const TransferEntry*>>
      transfers;
  for (const auto& e : request.transfer_plan.entries) {
    std::optional<std::size_t> anchor;
    if (e.anchor_loop) {
      anchor = model.find_loop(*e.anchor_loop);
      if (!anchor) throw ValidationError("transfer_plan", "unknown anchor loop '" + *e.anchor_loop + "'");
    }
    transfers[{anchor, e.position}].push_back(&e);
  }
  auto emit_transfers = [&](std::optional<std::size_t> anchor, AnchorPosition pos) {
    auto it = transfers.find({anchor, pos});
    if (it == transfers.end()) return;
    for (const TransferEntry* e : it->second) {
      const Variable* var = nullptr;
      for (const auto& v : model.variables())
        if (v.name == e->variable) var = &v;
      if (!var) throw ValidationError("transfer_plan", "unknown variable '" + e->variable + "'");
      const double once = static_cast<double>(var->size_bytes) / device->transfer_bandwidth_bytes_per_sec +
                          device->transfer_latency_sec;
      const double runs = static_cast<double>(anchor_executions(model, *e));
      phases.push_back({PhaseKind::transfer, runs * once, device->active_watts, e->variable});
    }
  };

  if (double serial = serial_cpu_seconds(model); serial > 0)
    phases.push_back({PhaseKind::cpu_compute, serial, cpu.active_watts, "serial"});
  emit_transfers(std::nullopt, AnchorPosition::before);
  auto visit = [&](auto&& self, std::size_t i) -> void {
    emit_transfers(i, AnchorPosition::before);
    const auto& loop = model.loop(i);
    if (placed[i]) {
      phases.push_back({PhaseKind::device_compute, cpu_time[i] / device->speedup_for(loop.id),
                        device->active_watts, loop.id});
    } else {
      phases.push_back({PhaseKind::cpu_compute, cpu_time[i], cpu.active_watts, loop.id});
    }
    for (std::size_t c : model.children_of(i)) self(self, c);
    emit_transfers(i, AnchorPosition::after);
  };
  for (std::size_t r : model.roots()) visit(visit, r);
  emit_transfers(std::nullopt, AnchorPosition::after);
  return phases;
}

// ---------------------------------------------------------------------------
// Simulated

Measurement SimulatedBackend::measure(const BackendRequest& request) {
  const auto phases = simulate_phases(request);
  double elapsed = 0.0;
  double energy = 0.0;
  for (const auto& p : phases) {
    elapsed += p.duration_sec;
    energy += p.duration_sec * p.watts;
  }
  if (!(elapsed > 0))
    return failed_measurement("simulated run has zero duration", idle_watts_for(request), policy_);
  return constant_power_measurement(elapsed, energy / elapsed, policy_);
}

std::string SimulatedBackend::id() const { return "simulated;" + tag(policy_); }

// ---------------------------------------------------------------------------
// Replay

ReplayBackend::ReplayBackend(std::filesystem::path directory, TimeoutPolicy policy)
    : directory_(std::move(directory)), policy_(policy) {
  const auto index_path = directory_ / "index.csv";
  std::ifstream in(index_path);
  if (!in) throw InputError("replay index not readable: " + index_path.string());
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = trim(line);
    if (view.empty()) continue;
    if (!header) {
      if (view != "fingerprint,elapsed_sec")
        throw ParseError(index_path.string() + ": expected header 'fingerprint,elapsed_sec'");
      header = true;
      continue;
    }
    auto comma = view.find(',');
    auto elapsed = comma == std::string_view::npos ? std::nullopt : to_double(view.substr(comma + 1));
    if (!elapsed || !(*elapsed > 0))
      throw ParseError(index_path.string() + ":" + std::to_string(lineno) +
                       ": expected '<fingerprint>,<positive seconds>'");
    index_[std::string(trim(view.substr(0, comma)))] = *elapsed;
  }
  if (!header) throw ParseError(index_path.string() + ": empty replay index");
}

Measurement ReplayBackend::measure(const BackendRequest& request) {
  const std::string fp = request.pattern.fingerprint();
  auto it = index_.find(fp);
  if (it == index_.end())
    return failed_measurement("no recorded run for pattern " + fp + " (" + request.pattern.placement() + ")",
                              idle_watts_for(request), policy_);
  try {
    auto samples = read_power_trace(directory_ / (fp + ".csv"));
    return measurement_from_trace(std::move(samples), it->second, policy_);
  } catch (const Error& e) {
    return failed_measurement(e.what(), idle_watts_for(request), policy_);
  }
}

std::string ReplayBackend::id() const {
  return "replay:" + std::filesystem::absolute(directory_).lexically_normal().string() + ";" + tag(policy_);
}

// ---------------------------------------------------------------------------
// External command

std::optional<double> parse_elapsed_output(std::string_view text) {
  std::optional<double> found;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    if (line.starts_with("elapsed_sec")) {
      line.remove_prefix(std::string_view("elapsed_sec").size());
      line = trim(line);
      if (!line.empty() && (line.front() == '=' || line.front() == ':')) line.remove_prefix(1);
    }
    if (auto v = to_double(line)) found = v;
  }
  return found;
}

CommandBackend::CommandBackend(std::string command_template, TimeoutPolicy policy,
                               std::size_t parallelism, std::filesystem::path work_dir)
    : template_(std::move(command_template)),
      policy_(policy),
      parallelism_(parallelism == 0 ? 1 : parallelism),
      work_dir_(work_dir.empty() ? std::filesystem::temp_directory_path() : std::move(work_dir)),
      slots_(std::make_unique<std::counting_semaphore<>>(static_cast<std::ptrdiff_t>(parallelism_))) {
  if (template_.empty()) throw InputError("command backend needs a command template");
}

Measurement CommandBackend::measure(const BackendRequest& request) {
  static std::atomic<unsigned long> counter{0};
  slots_->acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{*slots_};

  const std::string stem = "offload-tuner-" + std::to_string(::getpid()) + "-" +
                           std::to_string(counter.fetch_add(1));
  const auto pattern_file = work_dir_ / (stem + ".pattern.json");
  const auto trace_file = work_dir_ / (stem + ".trace.csv");
  struct Cleanup {
    std::filesystem::path a, b;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove(a, ec);
      std::filesystem::remove(b, ec);
    }
  } cleanup{pattern_file, trace_file};

  {
    nlohmann::json doc = {{"device", to_string(request.pattern.device)},
                          {"genes", request.pattern.bits()},
                          {"placement", request.pattern.placement()},
                          {"fingerprint", request.pattern.fingerprint()},
                          {"offloaded_loops", offloaded_loop_ids(request.model, request.pattern)}};
    nlohmann::json plan = nlohmann::json::array();
    for (const auto& e : request.transfer_plan.entries)
      plan.push_back({{"variable", e.variable},
                      {"direction", to_string(e.direction)},
                      {"anchor", e.anchor_loop ? nlohmann::json(*e.anchor_loop) : nlohmann::json(nullptr)},
                      {"position", to_string(e.position)}});
    doc["transfer_plan"] = std::move(plan);
    std::ofstream out(pattern_file);
    if (!out)
      return failed_measurement("cannot write " + pattern_file.string(), idle_watts_for(request), policy_);
    out << doc.dump(2) << '\n';
  }

  std::string command = template_;
  replace_all(command, "{pattern_file}", shell_quote(pattern_file.string()));
  replace_all(command, "{trace_out}", shell_quote(trace_file.string()));
  std::ostringstream env;
  env.precision(17);
  env << "OFFLOAD_TUNER_TIMEOUT_SEC=" << policy_.timeout_sec << "; export OFFLOAD_TUNER_TIMEOUT_SEC; ";
  command = env.str() + command;

  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return failed_measurement("cannot start command", idle_watts_for(request), policy_);
  std::string output;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
  const int status = ::pclose(pipe);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0)
    return failed_measurement("command exited with status " +
                                  std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : status),
                              idle_watts_for(request), policy_);
  auto elapsed = parse_elapsed_output(output);
  if (!elapsed || !(*elapsed > 0))
    return failed_measurement("command did not print a positive elapsed_sec", idle_watts_for(request),
                              policy_);
  try {
    return measurement_from_trace(read_power_trace(trace_file), *elapsed, policy_);
  } catch (const Error& e) {
    return failed_measurement(e.what(), idle_watts_for(request), policy_);
  }
}

std::string CommandBackend::id() const { return "command:" + template_ + ";" + tag(policy_); }

// ---------------------------------------------------------------------------

std::vector<Measurement> measure_all(MeasurementBackend& backend,
                                     std::span<const BackendRequest> requests) {
  std::vector<Measurement> out(requests.size());
  const std::size_t width = std::max<std::size_t>(1, backend.parallelism());
  if (width == 1 || requests.size() <= 1) {
    for (std::size_t i = 0; i < requests.size(); ++i) out[i] = backend.measure(requests[i]);
    return out;
  }
  for (std::size_t base = 0; base < requests.size(); base += width) {
    const std::size_t end = std::min(requests.size(), base + width);
    std::vector<std::future<Measurement>> jobs;
    for (std::size_t i = base; i < end; ++i)
      jobs.push_back(std::async(std::launch::async, [&backend, &requests, i] {
        return backend.measure(requests[i]);
      }));
    for (std::size_t i = base; i < end; ++i) out[i] = jobs[i - base].get();
  }
  return out;
}

}  // namespace offload
