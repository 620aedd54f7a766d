// Copyright 2026 The Offload Planner Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "offload/ga.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <thread>

#include "offload/error.hpp"

namespace offload::ga {

void GaConfig::validate() const {
  if (population_size == 0) throw ConfigError("population_size must be positive");
  if (generations == 0) throw ConfigError("generations must be positive");
  if (!(crossover_rate >= 0 && crossover_rate <= 1))
    throw ConfigError("crossover_rate must lie in [0, 1]");
  if (!(mutation_rate_per_bit >= 0 && mutation_rate_per_bit <= 1))
    throw ConfigError("mutation_rate_per_bit must lie in [0, 1]");
  if (elite_count >= population_size)
    throw ConfigError("elite_count must be smaller than population_size");
}

double fitness_of(const eval::Measurement& m) {
  if (!m.valid) return 0;
  // A zero-time measurement still has to rank first without overflowing the
  // roulette sum.
  return 1.0 / std::max(m.t_total, 1e-300);
}

std::size_t Rng::below(std::size_t n) {
  auto k = static_cast<std::size_t>(uniform() * double(n));
  return std::min(k, n - 1);
}

OffloadPattern random_pattern(std::size_t length, Rng& rng) {
  auto p = OffloadPattern::zeros(length);
  for (std::size_t i = 0; i < length; ++i) p.set(i, rng.bit());
  return p;
}

std::pair<OffloadPattern, OffloadPattern> crossover(const OffloadPattern& a,
                                                    const OffloadPattern& b,
                                                    double rate, Rng& rng) {
  OffloadPattern x = a, y = b;
  bool cross = rng.uniform() < rate;
  if (cross && a.size() >= 2) {
    std::size_t cut = 1 + rng.below(a.size() - 1);
    for (std::size_t i = cut; i < a.size(); ++i) {
      x.set(i, b[i]);
      y.set(i, a[i]);
    }
  }
  return {std::move(x), std::move(y)};
}

void mutate(OffloadPattern& gene, double rate, Rng& rng) {
  for (std::size_t i = 0; i < gene.size(); ++i)
    if (rng.uniform() < rate) gene.set(i, !gene[i]);
}

namespace {

std::size_t roulette(const std::vector<Individual>& pop, double total,
                     Rng& rng) {
  if (!(total > 0)) return rng.below(pop.size());
  double r = rng.uniform() * total;
  double acc = 0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (*pop[i].fitness <= 0) continue;
    acc += *pop[i].fitness;
    last_positive = i;
    if (r < acc) return i;
  }
  return last_positive;
}

}  // namespace

std::vector<Individual> next_generation(const std::vector<Individual>& pop,
                                        const GaConfig& cfg, Rng& rng) {
  for (const auto& ind : pop)
    if (!ind.fitness)
      throw UnevaluatedIndividual("individual " + ind.pattern.to_string() +
                                  " has no fitness");
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) {
    return *pop[x].fitness > *pop[y].fitness;
  });

  std::vector<Individual> next;
  next.reserve(cfg.population_size);
  for (std::size_t i = 0; i < cfg.elite_count && i < order.size(); ++i)
    next.push_back(pop[order[i]]);

  double total = 0;
  for (const auto& ind : pop) total += *ind.fitness;
  while (next.size() < cfg.population_size) {
    const auto& a = pop[roulette(pop, total, rng)].pattern;
    const auto& b = pop[roulette(pop, total, rng)].pattern;
    auto [x, y] = crossover(a, b, cfg.crossover_rate, rng);
    mutate(x, cfg.mutation_rate_per_bit, rng);
    mutate(y, cfg.mutation_rate_per_bit, rng);
    next.push_back({std::move(x), std::nullopt, std::nullopt});
    if (next.size() < cfg.population_size)
      next.push_back({std::move(y), std::nullopt, std::nullopt});
  }
  return next;
}

namespace {

class MeasurementCache {
 public:
  MeasurementCache(const minic::LoopTable& loops, const Evaluator& evaluate,
                   std::size_t workers)
      : loops_(loops), evaluate_(evaluate), workers_(std::max<std::size_t>(workers, 1)) {}

  void fill(std::vector<Individual>& pop) {
    std::vector<OffloadPattern> fresh;
    for (const auto& ind : pop) {
      if (cache_.count(ind.pattern) ||
          std::find(fresh.begin(), fresh.end(), ind.pattern) != fresh.end())
        continue;
      auto verdict = model::validate_pattern(ind.pattern, loops_);
      if (!verdict) {
        cache_.emplace(ind.pattern, eval::Measurement::infinite(verdict.reason));
        continue;
      }
      fresh.push_back(ind.pattern);
    }
    measure(fresh);
    for (auto& ind : pop) {
      const auto& m = cache_.at(ind.pattern);
      ind.measurement = m;
      ind.fitness = fitness_of(m);
    }
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  void measure(const std::vector<OffloadPattern>& fresh) {
    std::vector<std::optional<eval::Measurement>> results(fresh.size());
    std::vector<std::exception_ptr> errors(fresh.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < fresh.size();) {
        try {
          results[i] = evaluate_(fresh[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::size_t n = std::min(workers_, fresh.size());
    if (n <= 1) {
      work();
    } else {
      std::vector<std::thread> threads;
      for (std::size_t t = 0; t < n; ++t) threads.emplace_back(work);
      for (auto& t : threads) t.join();
    }
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
      cache_.emplace(fresh[i], std::move(*results[i]));
      ++evaluations_;
    }
  }

  const minic::LoopTable& loops_;
  const Evaluator& evaluate_;
  std::size_t workers_;
  std::map<OffloadPattern, eval::Measurement> cache_;
  std::size_t evaluations_ = 0;
};

}  // namespace

SearchResult run_ga(const minic::LoopTable& loops, const Evaluator& evaluate,
                    const GaConfig& cfg, const RunOptions& options) {
  cfg.validate();
  Rng rng(cfg.seed);
  MeasurementCache cache(loops, evaluate, options.workers);

  std::vector<Individual> pop;
  for (std::size_t i = 0; i < cfg.population_size; ++i)
    pop.push_back({random_pattern(loops.gene_length(), rng), std::nullopt,
                   std::nullopt});

  SearchResult result;
  for (std::size_t g = 0; g < cfg.generations; ++g) {
    cache.fill(pop);
    GenerationStats stats;
    double sum = 0;
    for (const auto& ind : pop) {
      stats.best = std::max(stats.best, *ind.fitness);
      sum += *ind.fitness;
      if (!result.best.fitness || *ind.fitness > *result.best.fitness)
        result.best = ind;
    }
    stats.mean = sum / double(pop.size());
    result.history.push_back(stats);
    if (g + 1 < cfg.generations) pop = next_generation(pop, cfg, rng);
  }
  result.evaluations = cache.evaluations();
  return result;
}

}  // namespace offload::ga
