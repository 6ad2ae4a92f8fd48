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

#include "offload/program_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json_fields.hpp"
#include "offload/errors.hpp"
#include "offload/hashing.hpp"

namespace offload {

using nlohmann::json;
using namespace detail;

std::string_view to_string(Device device) noexcept {
  switch (device) {
    case Device::cpu: return "cpu";
    case Device::manycore_cpu: return "manycore_cpu";
    case Device::gpu: return "gpu";
    case Device::fpga: return "fpga";
  }
  return "unknown";
}

std::optional<Device> parse_device(std::string_view text) noexcept {
  for (Device d : {Device::cpu, Device::manycore_cpu, Device::gpu, Device::fpga})
    if (to_string(d) == text) return d;
  return std::nullopt;
}

std::string_view to_string(AccessKind kind) noexcept {
  return kind == AccessKind::read ? "read" : "write";
}

namespace {

std::string loop_field(std::size_t i, std::string_view key) {
  return "loops[" + std::to_string(i) + "]." + std::string(key);
}

std::string read_file(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(std::string(what) + " not readable: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ProgramModel::ProgramModel(std::vector<LoopStatement> loops, std::vector<Variable> variables,
                           double baseline_cpu_time_sec, std::string name)
    : name_(std::move(name)),
      loops_(std::move(loops)),
      variables_(std::move(variables)),
      baseline_cpu_time_sec_(baseline_cpu_time_sec) {
  if (loops_.empty()) throw ValidationError("loops", "model needs at least one loop");
  if (!std::isfinite(baseline_cpu_time_sec_) || baseline_cpu_time_sec_ <= 0)
    throw ValidationError("baseline_cpu_time_sec", "must be a positive number");
  index_loops();
  validate_variables();
  digest_ = hex_digest(to_json(*this).dump());
}

void ProgramModel::index_loops() {
  const std::size_t n = loops_.size();
  double explicit_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = loops_[i];
    if (l.id.empty()) throw ValidationError(loop_field(i, "id"), "must be nonempty");
    if (!by_id_.emplace(l.id, i).second)
      throw ValidationError(loop_field(i, "id"), "duplicate loop id '" + l.id + "'");
    if (!std::isfinite(l.per_iteration_ops) || l.per_iteration_ops < 0)
      throw ValidationError(loop_field(i, "per_iteration_ops"), "must be >= 0");
    if (!std::isfinite(l.bytes_accessed) || l.bytes_accessed < 0)
      throw ValidationError(loop_field(i, "bytes_accessed"), "must be >= 0");
    if (!(l.fpga_resource_estimate >= 0 && l.fpga_resource_estimate <= 1))
      throw ValidationError(loop_field(i, "fpga_resource_estimate"), "must lie in [0, 1]");
    if (l.cpu_time_sec) {
      if (!std::isfinite(*l.cpu_time_sec) || *l.cpu_time_sec < 0)
        throw ValidationError(loop_field(i, "cpu_time_sec"), "must be >= 0");
      explicit_total += *l.cpu_time_sec;
    }
  }
  if (explicit_total > baseline_cpu_time_sec_ * (1 + 1e-12))
    throw ValidationError("loops", "explicit cpu_time_sec values exceed baseline_cpu_time_sec");

  parents_.assign(n, std::nullopt);
  children_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    const auto& parent = loops_[i].parent;
    if (!parent) {
      roots_.push_back(i);
      continue;
    }
    auto it = by_id_.find(*parent);
    if (it == by_id_.end())
      throw ValidationError(loop_field(i, "parent"), "unknown parent loop id '" + *parent + "'");
    if (it->second == i) throw ValidationError(loop_field(i, "parent"), "loop is its own parent");
    parents_[i] = it->second;
    children_[it->second].push_back(i);
  }
  // Cycle check: every parent chain must reach a root within n steps.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = i;
    std::size_t steps = 0;
    while (parents_[cur]) {
      cur = *parents_[cur];
      if (++steps > n)
        throw ValidationError(loop_field(i, "parent"),
                              "parent chain of loop '" + loops_[i].id + "' is cyclic");
    }
  }

  preorder_rank_.assign(n, 0);
  subtree_end_.assign(n, 0);
  depth_.assign(n, 0);
  auto visit = [&](auto&& self, std::size_t node, std::size_t d) -> void {
    preorder_rank_[node] = preorder_.size();
    depth_[node] = d;
    preorder_.push_back(node);
    for (std::size_t c : children_[node]) self(self, c, d + 1);
    subtree_end_[node] = preorder_.size();
  };
  for (std::size_t r : roots_) visit(visit, r, 0);

  for (std::size_t i = 0; i < n; ++i)
    if (loops_[i].parallelizable) eligible_.push_back(i);
}

bool ProgramModel::is_ancestor_or_self(std::size_t ancestor, std::size_t index) const {
  const auto r = preorder_rank_.at(index);
  return preorder_rank_.at(ancestor) <= r && r < subtree_end_.at(ancestor);
}

std::optional<std::size_t> ProgramModel::find_loop(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

void ProgramModel::validate_variables() {
  std::set<std::string, std::less<>> names;
  resolved_.reserve(variables_.size());
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    const auto& var = variables_[v];
    const std::string base = "variables[" + std::to_string(v) + "]";
    if (var.name.empty()) throw ValidationError(base + ".name", "must be nonempty");
    if (!names.insert(var.name).second)
      throw ValidationError(base + ".name", "duplicate variable '" + var.name + "'");
    if (var.size_bytes == 0) throw ValidationError(base + ".size_bytes", "must be positive");

    std::vector<ResolvedAccess> resolved;
    resolved.reserve(var.accesses.size());
    for (std::size_t a = 0; a < var.accesses.size(); ++a) {
      auto idx = find_loop(var.accesses[a].loop_id);
      if (!idx)
        throw ValidationError(base + ".accesses[" + std::to_string(a) + "]",
                              "unknown loop id '" + var.accesses[a].loop_id + "'");
      resolved.push_back({*idx, var.accesses[a].kind});
    }

    // Program order must be realizable by structured execution of the loop
    // forest: each loop's subtree is one contiguous run of use sites, and
    // unrelated loops appear in document order.
    const std::string order_field = base + ".accesses";
    for (std::size_t i = 0; i < resolved.size(); ++i) {
      for (std::size_t j = i + 1; j < resolved.size(); ++j) {
        const std::size_t a = resolved[i].loop;
        const std::size_t b = resolved[j].loop;
        if (is_ancestor_or_self(a, b) || is_ancestor_or_self(b, a)) continue;
        if (preorder_rank_[a] > preorder_rank_[b])
          throw ValidationError(order_field, "use of loop '" + loops_[b].id +
                                                 "' precedes unrelated earlier loop '" +
                                                 loops_[a].id + "'");
      }
    }
    for (std::size_t x = 0; x < loops_.size(); ++x) {
      bool seen = false;
      bool left = false;
      for (const auto& r : resolved) {
        bool inside = is_ancestor_or_self(x, r.loop);
        if (inside && left)
          throw ValidationError(order_field, "uses inside loop '" + loops_[x].id +
                                                 "' are not contiguous in program order");
        if (inside) seen = true;
        if (!inside && seen) left = true;
      }
    }
    resolved_.push_back(std::move(resolved));
  }
}

std::vector<std::string> parallelizable_loops(const ProgramModel& model) {
  std::vector<std::string> ids;
  for (std::size_t i : model.eligible_loops()) ids.push_back(model.loop(i).id);
  return ids;
}

ProgramModel model_from_json(const json& doc) {
  require_object(doc, "model");
  reject_unknown_keys(doc, "", {"name", "loops", "variables", "baseline_cpu_time_sec"});

  std::string name;
  if (doc.contains("name")) name = string_field(doc, "", "name");

  const auto& jloops = required(doc, "", "loops");
  if (!jloops.is_array()) throw ValidationError("loops", "expected an array");
  std::vector<LoopStatement> loops;
  for (std::size_t i = 0; i < jloops.size(); ++i) {
    const auto& jl = jloops[i];
    const std::string path = "loops[" + std::to_string(i) + "]";
    require_object(jl, path);
    reject_unknown_keys(jl, path,
                        {"id", "parent", "parallelizable", "iteration_count", "per_iteration_ops",
                         "bytes_accessed", "fpga_resource_estimate", "cpu_time_sec"});
    LoopStatement l;
    l.id = string_field(jl, path, "id");
    const auto& parent = required(jl, path, "parent");
    if (parent.is_string()) {
      l.parent = parent.get<std::string>();
    } else if (!parent.is_null()) {
      throw ValidationError(path + ".parent", "expected a loop id or null");
    }
    l.parallelizable = bool_field(jl, path, "parallelizable");
    l.iteration_count = count_field(jl, path, "iteration_count");
    l.per_iteration_ops = number_field(jl, path, "per_iteration_ops");
    l.bytes_accessed = number_field(jl, path, "bytes_accessed");
    l.fpga_resource_estimate = number_field(jl, path, "fpga_resource_estimate");
    if (jl.contains("cpu_time_sec")) l.cpu_time_sec = number_field(jl, path, "cpu_time_sec");
    loops.push_back(std::move(l));
  }

  std::vector<Variable> variables;
  if (doc.contains("variables")) {
    const auto& jvars = doc.at("variables");
    if (!jvars.is_array()) throw ValidationError("variables", "expected an array");
    for (std::size_t v = 0; v < jvars.size(); ++v) {
      const auto& jv = jvars[v];
      const std::string path = "variables[" + std::to_string(v) + "]";
      require_object(jv, path);
      reject_unknown_keys(jv, path, {"name", "size_bytes", "accesses"});
      Variable var;
      var.name = string_field(jv, path, "name");
      var.size_bytes = count_field(jv, path, "size_bytes");
      const auto& jacc = required(jv, path, "accesses");
      if (!jacc.is_array()) throw ValidationError(path + ".accesses", "expected an array");
      for (std::size_t a = 0; a < jacc.size(); ++a) {
        const auto& pair = jacc[a];
        const std::string apath = path + ".accesses[" + std::to_string(a) + "]";
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string())
          throw ValidationError(apath, "expected [loop_id, \"read\"|\"write\"]");
        const auto kind = pair[1].get<std::string>();
        if (kind != "read" && kind != "write")
          throw ValidationError(apath, "access kind must be \"read\" or \"write\"");
        var.accesses.push_back(
            {pair[0].get<std::string>(), kind == "read" ? AccessKind::read : AccessKind::write});
      }
      variables.push_back(std::move(var));
    }
  }

  double baseline = number_field(doc, "", "baseline_cpu_time_sec");
  return ProgramModel(std::move(loops), std::move(variables), baseline, std::move(name));
}

json to_json(const ProgramModel& model) {
  json doc = json::object();
  if (!model.name().empty()) doc["name"] = model.name();
  json loops = json::array();
  for (const auto& l : model.loops()) {
    json jl = {{"id", l.id},
               {"parent", l.parent ? json(*l.parent) : json(nullptr)},
               {"parallelizable", l.parallelizable},
               {"iteration_count", l.iteration_count},
               {"per_iteration_ops", l.per_iteration_ops},
               {"bytes_accessed", l.bytes_accessed},
               {"fpga_resource_estimate", l.fpga_resource_estimate}};
    if (l.cpu_time_sec) jl["cpu_time_sec"] = *l.cpu_time_sec;
    loops.push_back(std::move(jl));
  }
  doc["loops"] = std::move(loops);
  json vars = json::array();
  for (const auto& v : model.variables()) {
    json acc = json::array();
    for (const auto& a : v.accesses) acc.push_back({a.loop_id, to_string(a.kind)});
    vars.push_back({{"name", v.name}, {"size_bytes", v.size_bytes}, {"accesses", std::move(acc)}});
  }
  doc["variables"] = std::move(vars);
  doc["baseline_cpu_time_sec"] = model.baseline_cpu_time_sec();
  return doc;
}

ProgramModel parse_model(std::string_view text) {
  return model_from_json(parse_json_text(text, "model"));
}

ProgramModel load_model(const std::filesystem::path& path) {
  return parse_model(read_file(path, "model file"));
}

void save_model(const ProgramModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write model file: " + path.string());
  out << to_json(model).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Machine profile

double DeviceProfile::speedup_for(std::string_view loop_id) const {
  auto it = speedups.find(loop_id);
  return it == speedups.end() ? default_speedup : it->second;
}

MachineProfile::MachineProfile(std::map<Device, DeviceProfile> devices,
                               double fpga_resource_capacity_fraction)
    : devices_(std::move(devices)), fpga_capacity_(fpga_resource_capacity_fraction) {
  if (!devices_.contains(Device::cpu)) throw ValidationError("cpu", "profile needs a cpu entry");
  if (!(fpga_capacity_ > 0 && fpga_capacity_ <= 1))
    throw ValidationError("fpga_resource_capacity_fraction", "must lie in (0, 1]");
  for (const auto& [device, p] : devices_) {
    const std::string base(to_string(device));
    if (!(p.idle_watts >= 0)) throw ValidationError(base + ".idle_watts", "must be >= 0");
    if (!(p.active_watts >= p.idle_watts))
      throw ValidationError(base + ".active_watts", "must be >= idle_watts");
    if (!(p.transfer_bandwidth_bytes_per_sec > 0))
      throw ValidationError(base + ".transfer_bandwidth_bytes_per_sec", "must be > 0");
    if (!(p.transfer_latency_sec >= 0))
      throw ValidationError(base + ".transfer_latency_sec", "must be >= 0");
    if (!(p.default_speedup > 0)) throw ValidationError(base + ".default_speedup", "must be > 0");
    if (!(p.compile_cost_sec >= 0)) throw ValidationError(base + ".compile_cost_sec", "must be >= 0");
    for (const auto& [id, s] : p.speedups)
      if (!(s > 0) || !std::isfinite(s))
        throw ValidationError(base + ".speedups." + id, "must be a positive number");
  }
  digest_ = hex_digest(to_json(*this).dump());
}

const DeviceProfile& MachineProfile::at(Device device) const {
  auto it = devices_.find(device);
  if (it == devices_.end())
    throw ValidationError(std::string(to_string(device)), "device missing from machine profile");
  return it->second;
}

std::vector<Device> MachineProfile::offload_devices() const {
  std::vector<Device> out;
  for (Device d : {Device::manycore_cpu, Device::gpu, Device::fpga})
    if (has(d)) out.push_back(d);
  return out;
}

void MachineProfile::check_against(const ProgramModel& model) const {
  for (const auto& [device, p] : devices_)
    for (const auto& [id, _] : p.speedups)
      if (!model.find_loop(id))
        throw ValidationError(std::string(to_string(device)) + ".speedups." + id,
                              "names a loop that is not in the model");
}

MachineProfile profile_from_json(const json& doc) {
  require_object(doc, "profile");
  reject_unknown_keys(doc, "",
                      {"cpu", "manycore_cpu", "gpu", "fpga", "fpga_resource_capacity_fraction"});
  std::map<Device, DeviceProfile> devices;
  for (Device d : {Device::cpu, Device::manycore_cpu, Device::gpu, Device::fpga}) {
    const std::string key(to_string(d));
    if (!doc.contains(key)) continue;
    const auto& jd = doc.at(key);
    require_object(jd, key);
    DeviceProfile p;
    if (d == Device::cpu) {
      reject_unknown_keys(jd, key, {"idle_watts", "active_watts"});
    } else {
      reject_unknown_keys(jd, key,
                          {"idle_watts", "active_watts", "default_speedup", "speedups",
                           "transfer_bandwidth_bytes_per_sec", "transfer_latency_sec",
                           "compile_cost_sec", "shared_memory"});
      p.default_speedup = number_field_or(jd, key, "default_speedup", 1.0);
      p.transfer_bandwidth_bytes_per_sec =
          number_field(jd, key, "transfer_bandwidth_bytes_per_sec");
      p.transfer_latency_sec = number_field_or(jd, key, "transfer_latency_sec", 0.0);
      p.compile_cost_sec = number_field_or(jd, key, "compile_cost_sec", 0.0);
      p.shared_memory = bool_field_or(jd, key, "shared_memory", false);
      if (jd.contains("speedups")) {
        const auto& js = jd.at("speedups");
        require_object(js, key + ".speedups");
        for (const auto& [id, value] : js.items())
          p.speedups.emplace(id, as_number(value, key + ".speedups." + id));
      }
    }
    p.idle_watts = number_field(jd, key, "idle_watts");
    p.active_watts = number_field(jd, key, "active_watts");
    devices.emplace(d, std::move(p));
  }
  double capacity = number_field_or(doc, "", "fpga_resource_capacity_fraction", 0.8);
  return MachineProfile(std::move(devices), capacity);
}

json to_json(const MachineProfile& profile) {
  json doc = json::object();
  for (const auto& [device, p] : profile.devices()) {
    json jd = {{"idle_watts", p.idle_watts}, {"active_watts", p.active_watts}};
    if (device != Device::cpu) {
      jd["default_speedup"] = p.default_speedup;
      json sp = json::object();
      for (const auto& [id, s] : p.speedups) sp[id] = s;
      jd["speedups"] = std::move(sp);
      jd["transfer_bandwidth_bytes_per_sec"] = p.transfer_bandwidth_bytes_per_sec;
      jd["transfer_latency_sec"] = p.transfer_latency_sec;
      jd["compile_cost_sec"] = p.compile_cost_sec;
      jd["shared_memory"] = p.shared_memory;
    }
    doc[std::string(to_string(device))] = std::move(jd);
  }
  doc["fpga_resource_capacity_fraction"] = profile.fpga_resource_capacity_fraction();
  return doc;
}

MachineProfile parse_profile(std::string_view text) {
  return profile_from_json(parse_json_text(text, "profile"));
}

MachineProfile load_profile(const std::filesystem::path& path) {
  return parse_profile(read_file(path, "profile file"));
}

}  // namespace offload
