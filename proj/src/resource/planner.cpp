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

#include <cmath>
#include <optional>

#include "offload/error.hpp"
#include "offload/resource.hpp"

namespace offload::resource {

namespace {

constexpr double kMaxExact = 9007199254740992.0;  // 2^53

using u128 = unsigned __int128;

double cost(std::uint64_t c, std::uint64_t g, const PriceBook& p) {
  return double(c) * p.cpu_unit_price + double(g) * p.dev_unit_price;
}

// Largest k with k * unit <= budget, checked with the same arithmetic the
// callers use for the budget test.
std::uint64_t max_multiple(double unit, double budget) {
  double guess = std::floor(budget / unit);
  if (!(guess >= 0)) return 0;
  if (guess > kMaxExact) throw CapExceeded("budget allows more than 2^53 units");
  auto k = std::uint64_t(guess);
  while (k > 0 && double(k) * unit > budget) --k;
  while (double(k + 1) * unit <= budget) ++k;
  return k;
}

// Orders candidates by |ln((c * dev) / (g * cpu))| exactly: the distance is
// ln(hi / lo) with hi >= lo, so comparing hi1 * lo2 against hi2 * lo1 decides.
struct Distance {
  u128 hi, lo;
  Distance(std::uint64_t c, std::uint64_t g, const ResourceRatio& r) {
    u128 a = u128(c) * r.dev, b = u128(g) * r.cpu;
    hi = a > b ? a : b;
    lo = a > b ? b : a;
  }
};

// -1 when x is closer to the ratio than y, 1 when farther, 0 on a tie.
int compare(const Distance& x, const Distance& y) {
  // hi and lo stay below 2^117 for 2^53-bounded inputs, so split to avoid
  // overflowing 128 bits in the products.
  auto mul = [](u128 a, u128 b, u128& high, u128& low) {
    constexpr u128 mask = (u128(1) << 64) - 1;
    u128 a0 = a & mask, a1 = a >> 64, b0 = b & mask, b1 = b >> 64;
    u128 p00 = a0 * b0, p01 = a0 * b1, p10 = a1 * b0, p11 = a1 * b1;
    u128 mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
    low = (p00 & mask) | (mid << 64);
    high = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
  };
  u128 lh, ll, rh, rl;
  mul(x.hi, y.lo, lh, ll);
  mul(y.hi, x.lo, rh, rl);
  if (lh != rh) return lh < rh ? -1 : 1;
  if (ll != rl) return ll < rl ? -1 : 1;
  return 0;
}

}  // namespace

void PriceBook::validate() const {
  if (!(cpu_unit_price > 0) || !std::isfinite(cpu_unit_price) ||
      !(dev_unit_price > 0) || !std::isfinite(dev_unit_price))
    throw ConfigError("unit prices must be positive");
}

std::uint64_t round_half_up(double x) {
  return std::uint64_t(std::floor(x + 0.5));
}

ResourceRatio compute_ratio(double t_cpu, double t_dev) {
  if (!(t_cpu > 0) || !std::isfinite(t_cpu))
    throw NonPositiveTime("CPU time must be positive, got " + std::to_string(t_cpu));
  if (!(t_dev >= 0) || !std::isfinite(t_dev))
    throw NonPositiveTime("device time must be non-negative, got " +
                          std::to_string(t_dev));
  if (t_dev == 0) return ResourceRatio::cpu_only_marker();
  double q = t_cpu >= t_dev ? t_cpu / t_dev : t_dev / t_cpu;
  if (!(q + 0.5 < kMaxExact)) throw CapExceeded("time ratio exceeds 2^53");
  std::uint64_t n = std::max<std::uint64_t>(round_half_up(q), 1);
  return t_cpu >= t_dev ? ResourceRatio{n, 1, false}
                        : ResourceRatio{1, n, false};
}

Allocation plan_amount(const ResourceRatio& ratio, const PriceBook& prices,
                       double budget) {
  prices.validate();
  if (std::isnan(budget)) throw ConfigError("budget is not a number");

  if (ratio.cpu_only) {
    if (!(prices.cpu_unit_price <= budget))
      throw Infeasible("budget " + std::to_string(budget) +
                       " is below one CPU unit (" +
                       std::to_string(prices.cpu_unit_price) + ")");
    auto c = max_multiple(prices.cpu_unit_price, budget);
    return {c, 0, cost(c, 0, prices), true};
  }
  if (ratio.cpu == 0 || ratio.dev == 0)
    throw ConfigError("ratio sides must be positive");

  double unit = cost(ratio.cpu, ratio.dev, prices);
  if (auto k = max_multiple(unit, budget); k >= 1) {
    if (double(k) * double(std::max(ratio.cpu, ratio.dev)) > kMaxExact)
      throw CapExceeded("allocation exceeds 2^53 units");
    return {k * ratio.cpu, k * ratio.dev, cost(k * ratio.cpu, k * ratio.dev, prices),
            true};
  }

  if (cost(1, 1, prices) > budget)
    throw Infeasible("budget " + std::to_string(budget) +
                     " is below one CPU unit plus one device unit (" +
                     std::to_string(cost(1, 1, prices)) + ")");

  std::optional<Allocation> best;
  std::uint64_t pairs = 0;
  for (std::uint64_t c = 1; cost(c, 1, prices) <= budget; ++c) {
    for (std::uint64_t g = 1; cost(c, g, prices) <= budget; ++g) {
      if (++pairs > kFallbackPairCap)
        throw CapExceeded("fallback search exceeds " +
                          std::to_string(kFallbackPairCap) + " candidate pairs");
      bool better = !best;
      if (best) {
        int d = compare(Distance(c, g, ratio),
                        Distance(best->cpu_units, best->dev_units, ratio));
        std::uint64_t total = c + g, best_total = best->cpu_units + best->dev_units;
        better = d < 0 || (d == 0 && (total > best_total ||
                                      (total == best_total && c > best->cpu_units)));
      }
      if (better) best = Allocation{c, g, cost(c, g, prices), false};
    }
  }
  return *best;
}

}  // namespace offload::resource
