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

#pragma once

// Genetic search over offload patterns.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "offload/evaluation.hpp"
#include "offload/model.hpp"

namespace offload::ga {

using model::OffloadPattern;

struct GaConfig {
  std::size_t population_size = 16;
  std::size_t generations = 20;
  double crossover_rate = 0.9;
  double mutation_rate_per_bit = 0.05;
  std::size_t elite_count = 1;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void validate() const;
};

struct Individual {
  OffloadPattern pattern;
  std::optional<double> fitness;  // empty until evaluated
  std::optional<eval::Measurement> measurement;
};

struct GenerationStats {
  double best = 0;
  double mean = 0;
};

struct SearchResult {
  Individual best;
  std::vector<GenerationStats> history;
  std::size_t evaluations = 0;  // distinct patterns handed to the evaluator
};

// 1 / t_total for valid measurements, 0 for invalid ones.
double fitness_of(const eval::Measurement& m);

// Draws are defined on top of the raw 64-bit engine output so that a seed
// gives the same sequence with every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  bool bit() { return (engine_() >> 63) != 0; }
  double uniform() { return double(engine_() >> 11) * 0x1p-53; }  // [0, 1)
  std::size_t below(std::size_t n);  // uniform in [0, n), n > 0

 private:
  std::mt19937_64 engine_;
};

OffloadPattern random_pattern(std::size_t length, Rng& rng);

// Single-point crossover applied with probability `rate`; otherwise the
// parents are returned unchanged. The cut lies strictly inside the gene.
std::pair<OffloadPattern, OffloadPattern> crossover(const OffloadPattern& a,
                                                    const OffloadPattern& b,
                                                    double rate, Rng& rng);

// Flips each bit independently with probability `rate`.
void mutate(OffloadPattern& gene, double rate, Rng& rng);

// Elites first, then children of roulette-selected parents. Throws
// UnevaluatedIndividual.
std::vector<Individual> next_generation(const std::vector<Individual>& pop,
                                        const GaConfig& cfg, Rng& rng);

using Evaluator = std::function<eval::Measurement(const OffloadPattern&)>;

struct RunOptions {
  // Threads measuring distinct new patterns of a generation at once. The
  // result does not depend on it.
  std::size_t workers = 1;
};

// Patterns that nest an offloaded loop inside another get fitness 0 without
// being measured. Every other pattern is measured at most once.
SearchResult run_ga(const minic::LoopTable& loops, const Evaluator& evaluate,
                    const GaConfig& cfg, const RunOptions& options = {});

}  // namespace offload::ga
