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

#include "cli_app.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "offload/backend.hpp"
#include "offload/cache.hpp"
#include "offload/errors.hpp"
#include "offload/orchestrator.hpp"
#include "offload/report.hpp"

namespace offload::cli {

namespace {

using nlohmann::json;

struct GlobalOptions {
  std::string format = "auto";
  std::string cache_path;
  bool verbose = false;
};

struct SearchOptions {
  std::string model_path;
  std::string profile_path;
  std::string device = "gpu";
  std::string backend = "simulated";
  std::string replay_dir;
  std::string command;
  std::size_t parallelism = 1;
  std::optional<std::uint64_t> seed;
  std::size_t generations = GaConfig{}.generations;
  std::size_t population = GaConfig{}.population_size;
  double crossover_rate = GaConfig{}.crossover_rate;
  double mutation_rate = GaConfig{}.mutation_rate;
  std::size_t elitism = GaConfig{}.elitism_count;
  double timeout_sec = TimeoutPolicy{}.timeout_sec;
  double penalty_sec = TimeoutPolicy{}.penalty_sec;
  std::string exponents = "-0.5,-0.5";
  std::size_t k = FpgaFlowConfig{}.k;
  std::uint64_t min_iterations = FpgaFlowConfig{}.min_iterations;
  std::size_t combination_limit = FpgaFlowConfig{}.combination_limit;
  std::optional<double> budget_sec;
  std::string requirement = "none";
  std::string out_path;
};

std::string num(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

FitnessExponents parse_exponents(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InputError("--exponents expects 'a,b'");
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
    FitnessExponents e;
    e.time = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    e.power = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    return e;
  } catch (const std::logic_error&) {
    throw InputError("--exponents expects two numbers 'a,b', got '" + text + "'");
  }
}

bool use_table(const GlobalOptions& g, bool terminal) {
  return g.format == "table" || (g.format == "auto" && terminal);
}

std::unique_ptr<MeasurementBackend> make_backend(const SearchOptions& o, const TimeoutPolicy& policy) {
  if (o.backend == "simulated") return std::make_unique<SimulatedBackend>(policy, o.parallelism);
  if (o.backend == "replay") {
    if (o.replay_dir.empty()) throw InputError("--backend replay needs --replay-dir");
    return std::make_unique<ReplayBackend>(o.replay_dir, policy);
  }
  if (o.command.empty()) throw InputError("--backend command needs --command");
  return std::make_unique<CommandBackend>(o.command, policy, o.parallelism);
}

/// Loads, locks and later saves the persistent measurement cache.
class CacheSession {
 public:
  CacheSession(const GlobalOptions& g, std::ostream& err) {
    std::string path = g.cache_path;
    if (const char* env = std::getenv("OFFLOAD_TUNER_CACHE"); env && *env) path = env;
    if (path.empty()) return;
    path_ = path;
    lock_.emplace(path_);
    cache_.emplace();
    for (const auto& w : cache_load(path_, *cache_)) err << "warning: " << w << '\n';
  }
  MeasurementCache* get() { return cache_ ? &*cache_ : nullptr; }
  void save() {
    if (cache_) cache_store(path_, *cache_);
  }

 private:
  std::filesystem::path path_;
  std::optional<CacheFileLock> lock_;
  std::optional<MeasurementCache> cache_;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw InputError("cannot write " + path);
  f << text;
  if (!f.flush()) throw InputError("failed writing " + path);
}

void print_measurement_row(std::ostream& out, const char* label, const EvaluatedPattern& e) {
  const auto& m = e.measurement;
  out << label << num(m.elapsed_sec) << " s  " << num(m.energy_watt_sec) << " W*s  "
      << num(m.mean_watts) << " W  value " << num(e.value);
  if (m.failed) out << "  [failed: " << m.error << "]";
  else if (m.timed_out) out << "  [timed out]";
  out << '\n';
}

void print_search_table(std::ostream& out, const SearchReport& r) {
  out << "destination   " << to_string(r.destination) << " (" << r.algorithm << ")\n";
  out << "status        " << to_string(r.status) << '\n';
  out << "seed          " << r.seed << '\n';
  print_measurement_row(out, "baseline      ", r.baseline);
  print_measurement_row(out, "best          ", r.best);
  out << "pattern       " << r.best.pattern.bits() << '\n';
  out << "offloaded     ";
  if (r.best_offloaded_loops.empty()) out << "(none)";
  for (std::size_t i = 0; i < r.best_offloaded_loops.size(); ++i)
    out << (i ? ", " : "") << r.best_offloaded_loops[i];
  out << '\n';
  out << "improvement   time " << num(r.time_improvement, 4) << "x  energy " << num(r.energy_improvement, 4)
      << "x\n";
  out << "transfers     " << r.transfer_plan.entries.size() << " entries in " << r.transfer_plan.batch_count()
      << " batches\n";
  for (const auto& e : r.transfer_plan.entries)
    out << "  " << to_string(e.direction) << ' ' << e.variable << ' ' << to_string(e.position) << ' '
        << (e.anchor_loop ? *e.anchor_loop : std::string("<program>")) << '\n';
  out << "measurements  " << r.evaluated.size() << " patterns, " << r.backend_calls << " backend calls, "
      << r.cache_hits << " cache hits\n";
  out << "verify cost   " << num(r.verification_cost_sec) << " s\n";
  if (r.budget_exhausted) out << "budget        exhausted\n";
}

int search_exit(const SearchReport& r) { return r.all_failed() ? kBackendFailure : kOk; }

GaConfig ga_config(const SearchOptions& o, const GlobalOptions& g, std::uint64_t seed, std::ostream& err) {
  GaConfig c;
  c.population_size = o.population;
  c.generations = o.generations;
  c.crossover_rate = o.crossover_rate;
  c.mutation_rate = o.mutation_rate;
  c.elitism_count = o.elitism;
  c.rng_seed = seed;
  c.exponents = parse_exponents(o.exponents);
  c.wall_budget_sec = o.budget_sec;
  if (g.verbose)
    c.on_generation = [&err](const GenerationRecord& r) {
      err << "generation " << r.index << ": " << r.measured << " measured, best " << num(r.best_value)
          << " (" << r.best_pattern << ")\n";
    };
  return c;
}

FpgaFlowConfig fpga_config(const SearchOptions& o) {
  FpgaFlowConfig c;
  c.k = o.k;
  c.min_iterations = o.min_iterations;
  c.combination_limit = o.combination_limit;
  c.exponents = parse_exponents(o.exponents);
  c.wall_budget_sec = o.budget_sec;
  return c;
}

json run_echo(const SearchOptions& o, const ProgramModel& model) {
  return {{"backend", o.backend},
          {"timeout_sec", o.timeout_sec},
          {"penalty_sec", o.penalty_sec},
          {"model", model.name()},
          {"model_digest", model.digest()}};
}

std::uint64_t pick_seed(const SearchOptions& o) {
  if (o.seed) return *o.seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

int cmd_search(const SearchOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err,
               bool terminal) {
  const auto device = parse_device(o.device);
  if (!device || *device == Device::cpu)
    throw InputError("--device must be one of gpu, manycore_cpu, fpga");
  const auto model = load_model(o.model_path);
  const auto profile = load_profile(o.profile_path);
  const TimeoutPolicy policy{o.timeout_sec, o.penalty_sec};
  auto backend = make_backend(o, policy);
  CacheSession cache(g, err);
  const auto seed = pick_seed(o);

  SearchReport report = *device == Device::fpga
                            ? run_fpga_flow(model, profile, *backend, fpga_config(o), cache.get())
                            : run_ga(model, profile, *backend, *device, ga_config(o, g, seed, err), cache.get());
  report.seed = seed;
  report.config.update(run_echo(o, model));
  cache.save();

  const auto doc = to_json(report).dump(2) + "\n";
  if (!o.out_path.empty()) write_text(o.out_path, doc);
  if (use_table(g, terminal)) print_search_table(out, report);
  else if (o.out_path.empty()) out << doc;
  if (report.all_failed()) err << "error: every measurement failed\n";
  return search_exit(report);
}

int cmd_orchestrate(const SearchOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err,
                    bool terminal) {
  const auto requirement = UserRequirement::parse(o.requirement);
  const auto model = load_model(o.model_path);
  const auto profile = load_profile(o.profile_path);
  const TimeoutPolicy policy{o.timeout_sec, o.penalty_sec};
  auto backend = make_backend(o, policy);
  CacheSession cache(g, err);
  const auto seed = pick_seed(o);

  OrchestratorConfig config{ga_config(o, g, seed, err), fpga_config(o)};
  auto report = orchestrate(model, profile, *backend, requirement, config, cache.get());
  for (auto& t : report.tried)
    if (t.report) {
      t.report->seed = seed;
      t.report->config.update(run_echo(o, model));
    }
  cache.save();

  const auto doc = to_json(report).dump(2) + "\n";
  if (!o.out_path.empty()) write_text(o.out_path, doc);
  if (use_table(g, terminal)) {
    for (const auto& t : report.tried) {
      out << "== " << to_string(t.device) << (t.requirement_met ? " (requirement met)" : "") << '\n';
      if (t.report) print_search_table(out, *t.report);
      else out << "error: " << t.error << '\n';
    }
    for (const auto& s : report.skipped) out << "== " << to_string(s.device) << " skipped: " << s.reason << '\n';
    out << "stop reason   " << to_string(report.stop_reason) << '\n';
    out << "chosen        " << (report.chosen ? std::string(to_string(*report.chosen)) : "(none)") << '\n';
  } else if (o.out_path.empty()) {
    out << doc;
  }
  for (const auto& t : report.tried)
    if (!t.error.empty()) err << "warning: " << to_string(t.device) << " search failed: " << t.error << '\n';
  const auto* chosen = report.chosen_report();
  if (!chosen || chosen->all_failed()) {
    err << "error: no destination produced a usable measurement\n";
    return kBackendFailure;
  }
  return kOk;
}

int cmd_analyze(const std::string& model_path, const std::string& profile_path, const NarrowingConfig& nc,
                bool all, const GlobalOptions& g, std::ostream& out, bool terminal) {
  const auto model = load_model(model_path);
  const auto profile = load_profile(profile_path);
  profile.check_against(model);
  const auto rows = all ? score_loops(model, profile) : narrow_candidates(model, profile, nc);
  if (use_table(g, terminal)) {
    char line[256];
    std::snprintf(line, sizeof line, "%-20s %5s %14s %14s %10s %s\n", "loop", "gene", "intensity",
                  "iterations", "resource", "fits");
    out << line;
    for (const auto& r : rows) {
      std::snprintf(line, sizeof line, "%-20s %5zu %14s %14llu %10.4f %s\n", r.loop_id.c_str(), r.gene,
                    r.degenerate ? "inf" : num(r.arithmetic_intensity).c_str(),
                    static_cast<unsigned long long>(r.iteration_count), r.resource_fraction,
                    r.passed_resource_check ? "yes" : "no");
      out << line;
    }
    return kOk;
  }
  json doc = {{"schema", "offload-tuner/candidates/v1"},
              {"model", model.name()},
              {"k", nc.k},
              {"min_iterations", nc.min_iterations},
              {"all_loops", all}};
  json list = json::array();
  for (const auto& r : rows) list.push_back(to_json(r));
  doc["candidates"] = std::move(list);
  out << doc.dump(2) << '\n';
  return kOk;
}

int cmd_replay_energy(const std::string& trace_path, std::optional<double> elapsed, const GlobalOptions& g,
                      std::ostream& out, bool terminal) {
  const auto samples = read_power_trace(std::filesystem::path(trace_path));
  if (samples.empty()) throw DomainError("power trace has no samples");
  const double t = elapsed ? *elapsed : samples.back().t_sec;
  const double energy = integrate_energy(samples, t);
  if (use_table(g, terminal)) {
    out << "elapsed       " << num(t, 10) << " s\n";
    out << "energy        " << num(energy, 10) << " W*s\n";
    out << "mean power    " << num(energy / t, 10) << " W\n";
    out << "samples       " << samples.size() << '\n';
  } else {
    json doc = {{"elapsed_sec", t}, {"energy_watt_sec", energy}, {"mean_watts", energy / t},
                {"samples", samples.size()}};
    out << doc.dump(2) << '\n';
  }
  return kOk;
}

int cmd_fingerprint(const std::string& model_path, const std::string& device_name, const std::string& bits,
                    const std::vector<std::string>& loops, std::ostream& out) {
  const auto model = load_model(model_path);
  const auto device = parse_device(device_name);
  if (!device || *device == Device::cpu) throw InputError("--device must be one of gpu, manycore_cpu, fpga");
  const auto eligible = model.eligible_loops();
  OffloadPattern p = OffloadPattern::cpu_only(*device, eligible.size());
  if (!bits.empty()) {
    if (!loops.empty()) throw InputError("give either --pattern or --loops, not both");
    p = OffloadPattern::from_bits(*device, bits);
    check_pattern(model, p);
  }
  for (const auto& id : loops) {
    const auto idx = model.find_loop(id);
    if (!idx) throw InputError("unknown loop '" + id + "'");
    bool found = false;
    for (std::size_t g = 0; g < eligible.size(); ++g)
      if (eligible[g] == *idx) p.genes[g] = 1, found = true;
    if (!found) throw InputError("loop '" + id + "' is not offload-eligible");
  }
  out << p.fingerprint() << ' ' << p.bits() << ' ' << p.placement() << '\n';
  return kOk;
}

void add_search_options(CLI::App& cmd, SearchOptions& o) {
  cmd.add_option("model", o.model_path, "Program model JSON")->required();
  cmd.add_option("profile", o.profile_path, "Machine profile JSON")->required();
  cmd.add_option("--backend", o.backend, "Measurement backend")
      ->check(CLI::IsMember({"simulated", "replay", "command"}));
  cmd.add_option("--replay-dir", o.replay_dir, "Directory with index.csv and traces");
  cmd.add_option("--command", o.command, "Command template with {pattern_file} and {trace_out}");
  cmd.add_option("--parallelism", o.parallelism, "Concurrent trials")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", o.seed, "GA random seed (random and recorded when omitted)");
  cmd.add_option("--generations", o.generations, "GA generations");
  cmd.add_option("--population", o.population, "GA population size");
  cmd.add_option("--crossover-rate", o.crossover_rate, "GA crossover probability");
  cmd.add_option("--mutation-rate", o.mutation_rate, "GA per-gene mutation probability");
  cmd.add_option("--elitism", o.elitism, "GA elite count");
  cmd.add_option("--timeout-sec", o.timeout_sec, "Trial timeout");
  cmd.add_option("--penalty-sec", o.penalty_sec, "Elapsed time charged to timed-out trials");
  cmd.add_option("--exponents", o.exponents, "Evaluation exponents 'time,power'");
  cmd.add_option("--k", o.k, "FPGA candidates kept after narrowing");
  cmd.add_option("--min-iterations", o.min_iterations, "FPGA minimum loop iteration count");
  cmd.add_option("--combination-limit", o.combination_limit, "FPGA second-round pattern cap");
  cmd.add_option("--budget-sec", o.budget_sec, "Wall-clock budget per destination");
  cmd.add_option("--out", o.out_path, "Write the structured report here");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool out_is_terminal) {
  CLI::App app{"Offload pattern search over loop statements", "offload-tuner"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"auto", "table", "structured"}));
  app.add_option("--cache", g.cache_path, "Measurement cache file (OFFLOAD_TUNER_CACHE overrides)");
  app.add_flag("--verbose,-v", g.verbose, "Progress on stderr");

  std::string model_path, profile_path;
  NarrowingConfig nc;
  bool all_loops = false;
  auto* analyze = app.add_subcommand("analyze", "Rank FPGA offload candidates");
  analyze->add_option("model", model_path, "Program model JSON")->required();
  analyze->add_option("profile", profile_path, "Machine profile JSON")->required();
  analyze->add_option("--k", nc.k, "Candidates kept");
  analyze->add_option("--min-iterations", nc.min_iterations, "Minimum loop iteration count");
  analyze->add_flag("--all", all_loops, "List every eligible loop unfiltered");

  SearchOptions so;
  auto* search = app.add_subcommand("search", "Search offload patterns for one device");
  add_search_options(*search, so);
  search->add_option("--device", so.device, "gpu, manycore_cpu or fpga");

  SearchOptions oo;
  auto* orch = app.add_subcommand("orchestrate", "Try many-core CPU, GPU, then FPGA");
  add_search_options(*orch, oo);
  orch->add_option("--requirement", oo.requirement, "speedup=X, energy=Y, value=Z (comma-separated) or none");

  std::string trace_path;
  std::optional<double> elapsed;
  auto* replay = app.add_subcommand("replay-energy", "Integrate a power trace");
  replay->add_option("trace", trace_path, "t_sec,watts CSV")->required();
  replay->add_option("--elapsed", elapsed, "Run length (default: last sample time)");

  std::string fp_device = "gpu", fp_bits;
  std::vector<std::string> fp_loops;
  auto* fingerprint = app.add_subcommand("fingerprint", "Print the trace name of a pattern");
  fingerprint->add_option("model", model_path, "Program model JSON")->required();
  fingerprint->add_option("--device", fp_device, "gpu, manycore_cpu or fpga");
  fingerprint->add_option("--pattern", fp_bits, "Gene bits, e.g. 0100");
  fingerprint->add_option("--loops", fp_loops, "Offloaded loop ids")->delimiter(',');

  std::vector<std::string> argv_storage{"offload-tuner"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*analyze) return cmd_analyze(model_path, profile_path, nc, all_loops, g, out, out_is_terminal);
    if (*search) return cmd_search(so, g, out, err, out_is_terminal);
    if (*orch) return cmd_orchestrate(oo, g, out, err, out_is_terminal);
    if (*replay) return cmd_replay_energy(trace_path, elapsed, g, out, out_is_terminal);
    if (*fingerprint) return cmd_fingerprint(model_path, fp_device, fp_bits, fp_loops, out);
  } catch (const BackendError& e) {
    err << "error: " << e.what() << '\n';
    return kBackendFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace offload::cli
