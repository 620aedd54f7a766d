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

#include <cstdint>
#include <string>
#include <utility>

#include "offload/ga.hpp"
#include "offload/io.hpp"
#include "support/corpus.hpp"

namespace offload::testing {

// A corpus program with its cost file, measured by the sim backend.
struct SimInstance {
  minic::Ast ast;
  minic::LoopTable loops;
  eval::CostAnnotations costs;

  explicit SimInstance(const std::string& stem)
      : ast(minic::parse_program(read_corpus(stem + ".mc"))),
        loops(minic::extract_loops(ast)),
        costs(io::load_costs(corpus_path(stem + ".costs.json"))) {}

  eval::Measurement measure(const model::OffloadPattern& p) const {
    return eval::evaluate_sim(ast, loops, p,
                              model::plan_transfers(ast, loops, p), costs);
  }
  ga::Evaluator evaluator() const {
    return [this](const model::OffloadPattern& p) { return measure(p); };
  }

  // Exhaustive optimum over all 2^a patterns.
  std::pair<model::OffloadPattern, double> brute_force() const {
    std::size_t a = loops.gene_length();
    model::OffloadPattern best;
    double best_fit = -1;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << a); ++mask) {
      auto p = model::OffloadPattern::zeros(a);
      for (std::size_t i = 0; i < a; ++i) p.set(i, (mask >> i) & 1u);
      double f = model::validate_pattern(p, loops) ? ga::fitness_of(measure(p)) : 0;
      if (f > best_fit) {
        best_fit = f;
        best = p;
      }
    }
    return {best, best_fit};
  }
};

}  // namespace offload::testing
