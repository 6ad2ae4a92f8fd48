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

#include "offload/ga_search.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "offload/errors.hpp"
#include "search_common.hpp"

namespace offload {

void GaConfig::validate() const {
  if (population_size < 2) throw InputError("population_size must be at least 2");
  if (generations < 1) throw InputError("generations must be at least 1");
  if (!(crossover_rate >= 0 && crossover_rate <= 1)) throw InputError("crossover_rate must be in [0, 1]");
  if (!(mutation_rate >= 0 && mutation_rate <= 1)) throw InputError("mutation_rate must be in [0, 1]");
  if (elitism_count > population_size) throw InputError("elitism_count exceeds population_size");
  if (wall_budget_sec && !(*wall_budget_sec > 0)) throw InputError("wall budget must be positive");
}

std::size_t GaRng::below(std::size_t n) {
  if (n == 0) throw InputError("GaRng::below needs n > 0");
  return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

std::size_t roulette_pick(std::span<const double> fitness, GaRng& rng) {
  if (fitness.empty()) throw InputError("roulette over an empty population");
  double total = 0.0;
  for (double f : fitness) total += (f > 0 ? f : 0.0);
  if (!(total > 0)) return rng.below(fitness.size());
  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    if (!(fitness[i] > 0)) continue;
    acc += fitness[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

ParentSelection select_parents(std::span<const double> fitness, std::size_t elitism_count, GaRng& rng) {
  ParentSelection out;
  const std::size_t n = fitness.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
  out.elites.assign(order.begin(), order.begin() + std::min(elitism_count, n));
  const std::size_t remaining = n - out.elites.size();
  for (std::size_t i = 0; i < (remaining + 1) / 2; ++i) {
    const auto a = roulette_pick(fitness, rng);
    const auto b = roulette_pick(fitness, rng);
    out.pairs.emplace_back(a, b);
  }
  return out;
}

std::pair<Genes, Genes> single_point_crossover(const Genes& a, const Genes& b, std::size_t cut) {
  if (a.size() != b.size()) throw InputError("crossover parents differ in length");
  if (cut > a.size()) throw InputError("crossover cut out of range");
  Genes x(a.begin(), a.begin() + cut);
  Genes y(b.begin(), b.begin() + cut);
  x.insert(x.end(), b.begin() + cut, b.end());
  y.insert(y.end(), a.begin() + cut, a.end());
  return {std::move(x), std::move(y)};
}

std::pair<Genes, Genes> crossover_mutate(const Genes& a, const Genes& b, const GaConfig& config,
                                         GaRng& rng) {
  if (a.size() != b.size()) throw InputError("crossover parents differ in length");
  std::pair<Genes, Genes> children{a, b};
  if (rng.bernoulli(config.crossover_rate) && a.size() >= 2)
    children = single_point_crossover(a, b, 1 + rng.below(a.size() - 1));
  for (auto* child : {&children.first, &children.second})
    for (auto& g : *child)
      if (rng.bernoulli(config.mutation_rate)) g ^= 1;
  return children;
}

namespace {

nlohmann::json config_json(const GaConfig& c) {
  nlohmann::json j = {{"population_size", c.population_size},
                      {"generations", c.generations},
                      {"crossover_rate", c.crossover_rate},
                      {"mutation_rate", c.mutation_rate},
                      {"elitism_count", c.elitism_count}};
  j["wall_budget_sec"] = c.wall_budget_sec ? nlohmann::json(*c.wall_budget_sec) : nlohmann::json();
  return j;
}

}  // namespace

SearchReport run_ga(const ProgramModel& model, const MachineProfile& profile,
                    MeasurementBackend& backend, Device device, const GaConfig& config,
                    MeasurementCache* cache) {
  config.validate();
  if (device == Device::cpu) throw InputError("GA destination must be an offload device");
  profile.check_against(model);
  const auto started = std::chrono::steady_clock::now();

  detail::PatternEvaluator eval(model, profile, backend, device, config.exponents, cache);
  const std::size_t n = model.eligible_loops().size();
  const std::size_t baseline = eval.evaluate_one(OffloadPattern::cpu_only(device, n));

  auto finish = [&](SearchStatus status, std::size_t best) {
    auto report = eval.make_report("ga", status, baseline, best);
    report.seed = config.rng_seed;
    report.config = config_json(config);
    return report;
  };
  if (n == 0) return finish(SearchStatus::nothing_to_offload, baseline);

  GaRng rng(config.rng_seed);
  std::vector<Genes> population;
  population.push_back(Genes(n, 0));
  while (population.size() < config.population_size) {
    Genes g(n);
    for (auto& bit : g) bit = rng.bernoulli(0.5) ? 1 : 0;
    population.push_back(std::move(g));
  }

  std::vector<GenerationRecord> history;
  std::size_t best = baseline;
  bool exhausted = false;
  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    if (gen > 0 && config.wall_budget_sec) {
      const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - started;
      if (spent.count() >= *config.wall_budget_sec) {
        exhausted = true;
        break;
      }
    }
    std::vector<OffloadPattern> patterns;
    patterns.reserve(population.size());
    for (const auto& g : population) patterns.push_back(OffloadPattern{device, g});
    const std::size_t calls_before = eval.backend_calls();
    const auto idx = eval.evaluate(patterns);

    std::vector<double> fitness(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      fitness[i] = eval.at(idx[i]).value;
      const std::size_t cand[] = {best, idx[i]};
      best = eval.best_of(cand);
    }

    GenerationRecord rec;
    rec.index = gen;
    rec.evaluated = idx.size();
    rec.measured = eval.backend_calls() - calls_before;
    rec.best_value = eval.at(best).value;
    rec.best_pattern = eval.at(best).pattern.bits();
    if (config.on_generation) config.on_generation(rec);
    history.push_back(std::move(rec));

    if (gen + 1 == config.generations) break;
    const auto sel = select_parents(fitness, config.elitism_count, rng);
    std::vector<Genes> next;
    next.reserve(population.size());
    for (auto e : sel.elites) next.push_back(population[e]);
    for (const auto& [a, b] : sel.pairs) {
      auto [x, y] = crossover_mutate(population[a], population[b], config, rng);
      if (next.size() < population.size()) next.push_back(std::move(x));
      if (next.size() < population.size()) next.push_back(std::move(y));
    }
    population = std::move(next);
  }

  auto report = finish(eval.at(best).pattern.any() ? SearchStatus::ok : SearchStatus::no_offload_found, best);
  report.history = std::move(history);
  report.budget_exhausted = exhausted;
  return report;
}

}  // namespace offload
