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

// Exhaustive enumeration oracle for plan_amount on small instances. Ratio
// closeness is compared as reduced fractions with 64-bit cross products,
// independent of the planner's logarithm-free comparison.

#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "offload/resource.hpp"

namespace offload::testing {

struct PlannerInstance {
  resource::ResourceRatio ratio;
  resource::PriceBook prices;
  double budget = 0;

  std::string describe() const {
    std::ostringstream s;
    s << ratio.cpu << ":" << ratio.dev << " prices " << prices.cpu_unit_price
      << "/" << prices.dev_unit_price << " budget " << budget;
    return s.str();
  }
};

// Integer prices and budgets keep every cost exact; budgets stay below 100
// of the cheaper unit so that no feasible count exceeds 100.
inline PlannerInstance random_planner_instance(std::mt19937_64& rng) {
  PlannerInstance inst;
  std::uint64_t side = 1 + rng() % 12;
  inst.ratio = rng() % 2 ? resource::ResourceRatio{side, 1, false}
                         : resource::ResourceRatio{1, side, false};
  inst.prices = {double(1 + rng() % 40), double(1 + rng() % 40)};
  double cheapest = std::min(inst.prices.cpu_unit_price, inst.prices.dev_unit_price);
  inst.budget = double(rng() % std::uint64_t(100 * cheapest + 1));
  return inst;
}

inline std::optional<resource::Allocation> enumerate_allocation(
    const PlannerInstance& in) {
  const auto& r = in.ratio;
  auto cost = [&](std::uint64_t c, std::uint64_t g) {
    return double(c) * in.prices.cpu_unit_price + double(g) * in.prices.dev_unit_price;
  };
  // Ratio-preserving multiples first: the largest one that fits.
  std::optional<resource::Allocation> kept;
  for (std::uint64_t k = 1; k * r.cpu <= 100 && k * r.dev <= 100; ++k)
    if (cost(k * r.cpu, k * r.dev) <= in.budget)
      kept = resource::Allocation{k * r.cpu, k * r.dev, cost(k * r.cpu, k * r.dev), true};
  if (kept) return kept;

  // Otherwise the closest feasible pair. Distance |ln(c*dev / (g*cpu))| is
  // ranked by the fraction max/min of the two products.
  std::optional<resource::Allocation> best;
  std::int64_t best_num = 0, best_den = 1;
  for (std::uint64_t c = 1; c <= 100; ++c) {
    for (std::uint64_t g = 1; g <= 100; ++g) {
      if (cost(c, g) > in.budget) continue;
      std::int64_t x = std::int64_t(c * r.dev), y = std::int64_t(g * r.cpu);
      std::int64_t num = std::max(x, y), den = std::min(x, y);
      bool better = false;
      if (!best) {
        better = true;
      } else if (num * best_den != best_num * den) {
        better = num * best_den < best_num * den;
      } else if (c + g != best->cpu_units + best->dev_units) {
        better = c + g > best->cpu_units + best->dev_units;
      } else {
        better = c > best->cpu_units;
      }
      if (better) {
        best = resource::Allocation{c, g, cost(c, g), false};
        best_num = num;
        best_den = den;
      }
    }
  }
  return best;
}

}  // namespace offload::testing
