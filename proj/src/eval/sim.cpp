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

#include <algorithm>
#include <cmath>

#include "offload/error.hpp"
#include "offload/evaluation.hpp"

namespace offload::eval {

Measurement Measurement::infinite(std::string note, bool timed_out) {
  Measurement m;
  m.valid = false;
  m.timed_out = timed_out;
  m.note = std::move(note);
  return m;
}

void CostAnnotations::validate() const {
  auto check = [](const LoopCost& c, const std::string& where) {
    if (!(c.work >= 0) || !std::isfinite(c.work))
      throw ConfigError(where + ": work must be a finite non-negative number");
    if (!(c.speedup > 0) || !std::isfinite(c.speedup))
      throw ConfigError(where + ": speedup must be positive");
  };
  for (const auto& [id, c] : loops) check(c, "loop " + std::to_string(id));
  if (fallback) check(*fallback, "default cost");
  for (double g : {globals.tau_host, globals.launch_overhead,
                   globals.bandwidth, globals.transfer_latency})
    if (!(g > 0) || !std::isfinite(g))
      throw ConfigError("cost globals must be positive");
}

namespace {

LoopCost cost_of(const minic::LoopInfo& loop, const CostAnnotations& costs) {
  if (auto it = costs.loops.find(loop.loop_id); it != costs.loops.end())
    return it->second;
  if (costs.fallback) return *costs.fallback;
  if (loop.eligible)
    throw MissingAnnotation("no cost annotation for eligible loop " +
                            std::to_string(loop.loop_id));
  return LoopCost{0, 1};
}

}  // namespace

Measurement evaluate_sim(const minic::Ast& /*ast*/,
                         const minic::LoopTable& loops,
                         const model::OffloadPattern& pattern,
                         const model::TransferPlan& plan,
                         const CostAnnotations& costs,
                         const SimOptions& options) {
  auto verdict = model::validate_pattern(pattern, loops);
  if (!verdict) throw InvalidPattern(verdict.reason);
  if (std::find(options.fault_injection.begin(), options.fault_injection.end(),
                pattern) != options.fault_injection.end())
    return Measurement::infinite("fault injection");

  const auto& g = costs.globals;
  auto exec = [&](NodeId id) {
    auto n = loops.entry_count(id);
    if (!n)
      throw NonStaticTrip("loop " + std::to_string(id) +
                          " is entered a non-static number of times");
    return double(*n);
  };
  auto trip = [&](const minic::LoopInfo& l) {
    if (!l.trip_count)
      throw NonStaticTrip("loop " + std::to_string(l.loop_id) +
                          " has no static trip count");
    return double(*l.trip_count);
  };

  auto offloaded = model::offloaded_loops(pattern, loops);
  auto region_of = [&](const minic::LoopInfo& l) -> std::optional<NodeId> {
    if (std::count(offloaded.begin(), offloaded.end(), l.loop_id))
      return l.loop_id;
    for (NodeId a : loops.ancestors(l.loop_id))
      if (std::count(offloaded.begin(), offloaded.end(), a)) return a;
    return std::nullopt;
  };

  Measurement m;
  // Total work executed inside each region over the whole run, which is
  // exec(r) times the per-launch sum of iters(r, l) * work(l).
  std::map<NodeId, double> region_work;
  for (const auto& l : loops.loops()) {
    double body = trip(l) * cost_of(l, costs).work;
    if (auto r = region_of(l)) {
      region_work[*r] += exec(l.loop_id) * body;
    } else {
      m.t_cpu += exec(l.loop_id) * body * g.tau_host;
    }
  }
  for (NodeId r : offloaded) {
    double speedup = cost_of(loops.at(r), costs).speedup;
    m.t_dev += exec(r) * g.launch_overhead +
               region_work[r] * g.tau_host / speedup;
  }
  for (const auto& op : plan.ops)
    m.t_dev += (g.transfer_latency + double(op.bytes) / g.bandwidth) *
               exec(op.anchor.loop);
  m.t_total = m.t_cpu + m.t_dev;
  return m;
}

}  // namespace offload::eval
