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

// Post-planning verification: performance cases, result diffs, regression
// commands and the user-facing report.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "offload/evaluation.hpp"
#include "offload/model.hpp"
#include "offload/resource.hpp"

namespace offload::verify {

enum class TestKind { Performance, Regression };

struct TestCase {
  std::string name;
  TestKind kind = TestKind::Regression;

  // Performance, simulated: the program text run with `pattern` on two
  // memory spaces and compared against the baseline program.
  std::optional<std::string> source;
  std::optional<model::OffloadPattern> pattern;
  std::optional<std::string> baseline;  // unoffloaded program text

  // Performance, external: a measurement command whose valid flag is the
  // diff verdict. Regression: any shell command, pass = exit 0.
  std::optional<std::string> command;

  eval::ToleranceSpec tolerance;
};

// Component name -> regression commands.
using SoftwareRegistry = std::map<std::string, std::vector<std::string>>;

struct PerformanceResult {
  std::string name;
  bool pass = false;
  double scaled_time = 0;  // seconds on the planned allocation
  double throughput = 0;   // runs per second, 1 / scaled_time
  std::optional<eval::DiffVerdict> diff;
  std::optional<eval::Measurement> measurement;  // external cases only
  std::string note;
};

struct RegressionResult {
  std::string name;
  std::string component;  // empty for cases from the tests file
  std::string command;
  bool pass = false;
  int exit_code = -1;
  bool timed_out = false;
  std::string note;
};

enum class Recommendation { Ready, Attention };

struct VerificationReport {
  resource::Allocation allocation;
  eval::Measurement measurement;
  std::vector<PerformanceResult> performance;
  std::vector<RegressionResult> regression;
  std::vector<std::string> uncovered_components;
  Recommendation recommendation = Recommendation::Attention;
};

// Scaled processing time under the linear model: each part shrinks with the
// number of units on its side.
double scaled_time(const eval::Measurement& m, const resource::Allocation& a);

struct VerifyOptions {
  double timeout_seconds = 300;
  std::size_t workers = 1;  // cases run at once; order of the report is fixed
  std::uint64_t iteration_cap = 100'000'000;
  // Files handed to external performance commands as {source}/{pattern};
  // {baseline} receives a temporary copy of the case's baseline text.
  eval::ExternalArtifacts artifacts;
};

// Throws ConfigError when a performance case has no baseline. Failures of
// individual cases are recorded in the report.
VerificationReport run_verification(const resource::Allocation& allocation,
                                    const eval::Measurement& measurement,
                                    const std::vector<TestCase>& tests,
                                    const SoftwareRegistry& registry,
                                    const std::vector<std::string>& components,
                                    const VerifyOptions& options = {});

std::string render_text(const VerificationReport& report);

}  // namespace offload::verify
