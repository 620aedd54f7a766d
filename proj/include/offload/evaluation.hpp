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

// Measuring offload patterns: a deterministic cost model, an external
// measurement command, and numeric comparison of program outputs.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "offload/minic.hpp"
#include "offload/model.hpp"

namespace offload::eval {

using minic::NodeId;

// Serialized form of the time of an invalid measurement.
inline constexpr std::string_view kInfiniteTime = "INFINITE_TIME";

struct Measurement {
  double t_total = 0;
  double t_cpu = 0;
  double t_dev = 0;
  bool valid = true;
  bool timed_out = false;
  std::string note;  // why the measurement is invalid, if it is
  std::optional<minic::ProgramOutput> outputs;

  // An invalid measurement. Its time is INFINITE_TIME; the numeric fields
  // are zero and must not be read as times.
  static Measurement infinite(std::string note, bool timed_out = false);
  bool is_infinite() const { return !valid; }
};

struct LoopCost {
  double work = 0;      // work units per iteration of the immediate body
  double speedup = 10;  // device speedup of a region rooted at the loop
};

struct CostGlobals {
  double tau_host = 1e-9;          // seconds per work unit on the CPU
  double launch_overhead = 1e-4;   // seconds per kernel launch
  double bandwidth = 1e10;         // bytes per second
  double transfer_latency = 1e-5;  // seconds per transfer
};

struct CostAnnotations {
  std::map<NodeId, LoopCost> loops;
  // Used for loops without an entry. Without it an eligible loop lacking
  // an entry is an error; other loops default to zero work.
  std::optional<LoopCost> fallback;
  CostGlobals globals;

  // Throws ConfigError on negative work, non-positive speedup or globals.
  void validate() const;
};

struct SimOptions {
  // Patterns whose measurement is forced invalid.
  std::vector<model::OffloadPattern> fault_injection;
};

// Cost model:
//   host loop body   exec(l) * trip(l) * work(l) * tau
//   region r         exec(r) * (L + sum over l in r of
//                                 iters(r, l) * work(l) * tau / speedup(r))
//   transfer op      (latency + bytes / W) * exec(anchor)
// Transfers are charged to the device part. Throws InvalidPattern,
// LengthMismatch, NonStaticTrip and MissingAnnotation.
Measurement evaluate_sim(const minic::Ast& ast, const minic::LoopTable& loops,
                         const model::OffloadPattern& pattern,
                         const model::TransferPlan& plan,
                         const CostAnnotations& costs,
                         const SimOptions& options = {});

struct ExternalArtifacts {
  std::string source_path;   // substituted for {source}
  std::string pattern_path;  // substituted for {pattern}
};

// Expands the {source} and {pattern} slots (shell-quoted) and runs the
// command. The final non-empty stdout line must read
// `t_total t_cpu t_dev valid`. A nonzero exit, a malformed line, valid=0 or
// a timeout yield an invalid measurement. Throws SpawnError.
Measurement evaluate_external(const std::string& command_template,
                              const ExternalArtifacts& artifacts,
                              double timeout_seconds = 300);

std::string expand_command(const std::string& command_template,
                           const ExternalArtifacts& artifacts);

// Parses a measurement line; nullopt when malformed.
std::optional<Measurement> parse_measurement_line(std::string_view line);

enum class ToleranceMode { Absolute, Relative, Ulp };

struct ToleranceSpec {
  ToleranceMode mode = ToleranceMode::Relative;
  double atol = 1e-12;
  double rtol = 1e-6;
  std::uint64_t max_ulps = 0;

  // Throws ConfigError on negative or NaN bounds, or when the mode's bounds
  // are all infinite.
  void validate() const;
};

struct Deviation {
  std::string variable;
  std::size_t index = 0;
  double actual = 0;
  double baseline = 0;
  // |actual - baseline|, or the ulp distance in ulp mode. Infinite when
  // exactly one side is NaN.
  double deviation = 0;
};

struct DiffVerdict {
  bool pass = true;
  std::optional<Deviation> worst;
  std::vector<Deviation> per_variable;  // worst element of each variable
};

// Distance between two doubles in units in the last place, over the
// sign-aware ordering of binary64 bit patterns (+0 and -0 are 0 apart).
std::uint64_t ulp_distance(double x, double y);

// Element-wise comparison. Two NaNs compare equal. Throws ShapeMismatch
// when the variable sets or lengths differ.
DiffVerdict compare_results(const minic::ProgramOutput& actual,
                            const minic::ProgramOutput& baseline,
                            const ToleranceSpec& tolerance = {});

}  // namespace offload::eval
