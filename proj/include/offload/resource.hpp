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

// Sizing the CPU and device allocation from a measured time split.

#include <cstdint>

namespace offload::resource {

// cpu:dev with one side equal to 1. `cpu_only` marks a pattern that puts
// nothing on the device; the counts are then 1:0.
struct ResourceRatio {
  std::uint64_t cpu = 1;
  std::uint64_t dev = 1;
  bool cpu_only = false;

  static ResourceRatio cpu_only_marker() { return {1, 0, true}; }
  bool operator==(const ResourceRatio&) const = default;
};

struct PriceBook {
  double cpu_unit_price = 0;  // per CPU unit and month
  double dev_unit_price = 0;  // per device unit and month

  // Throws ConfigError unless both prices are positive and finite.
  void validate() const;
};

struct Allocation {
  std::uint64_t cpu_units = 0;
  std::uint64_t dev_units = 0;
  double monthly_cost = 0;
  bool ratio_kept = false;

  bool operator==(const Allocation&) const = default;
};

// Rounds half up: 2.5 -> 3.
std::uint64_t round_half_up(double x);

// Time ratio rounded half up, the shorter side fixed to 1. Throws
// NonPositiveTime when t_cpu <= 0 or t_dev < 0, and CapExceeded when the
// rounded ratio does not fit in 2^53.
ResourceRatio compute_ratio(double t_cpu, double t_dev);

// The largest whole multiple of the ratio within budget. When not even one
// multiple fits, the (c >= 1, g >= 1) pair within budget closest to the ratio
// on a log scale, preferring more units, then more CPU units. Throws
// Infeasible, CapExceeded (fallback search over more than 10^6 pairs) and
// ConfigError (bad prices).
Allocation plan_amount(const ResourceRatio& ratio, const PriceBook& prices,
                       double budget);

inline constexpr std::uint64_t kFallbackPairCap = 1'000'000;

}  // namespace offload::resource
