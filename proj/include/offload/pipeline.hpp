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

// The analyze -> search -> plan -> verify pipeline and its file contracts.
//
// Every stage reads its inputs from files and writes its artifacts into an
// output directory, so the stages can run one at a time or all together:
//   analyze  loops.json
//   search   pattern.json, <stem>.acc.mc, search.json
//   plan     plan.json
//   verify   report.json, report.txt

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "offload/evaluation.hpp"
#include "offload/ga.hpp"
#include "offload/io.hpp"
#include "offload/resource.hpp"
#include "offload/verification.hpp"

namespace offload::pipeline {

namespace fs = std::filesystem;

enum class Backend { Sim, External };

struct SearchSettings {
  fs::path source;
  std::optional<fs::path> costs;     // required by the sim backend
  Backend backend = Backend::Sim;
  std::optional<std::string> command;  // required by the external backend
  double timeout_seconds = 300;
  ga::GaConfig ga;
  std::size_t concurrency = 1;
  std::vector<std::string> fault_injection;  // bit strings
};

struct VerifySettings {
  fs::path plan_file;
  std::optional<fs::path> tests;
  std::optional<fs::path> registry;
  std::vector<std::string> components;
  eval::ToleranceSpec tolerance;  // for cases that do not set their own
  double timeout_seconds = 300;
  std::size_t concurrency = 1;
};

struct PipelineConfig {
  SearchSettings search;
  resource::PriceBook prices;
  double budget = 0;
  VerifySettings verify;  // plan_file is filled in by run_all
  fs::path output_dir;
};

// Relative paths in the file are taken relative to the file's directory.
// Throws ConfigError on unknown keys, bad values and missing files.
PipelineConfig load_config(const fs::path& path);

// Applies OFFLOAD_SEED from the environment, if set, to `cfg`.
void apply_seed_override(ga::GaConfig& cfg);

// Parses "population_size=8,seed=3" onto `base`.
ga::GaConfig parse_ga_overrides(const std::string& text, ga::GaConfig base);

void analyze(const fs::path& source, const std::optional<fs::path>& costs,
             const fs::path& out_dir);

// Returns the best pattern's measurement.
eval::Measurement search(const SearchSettings& settings, const fs::path& out_dir);

resource::Allocation plan(double t_cpu, double t_dev,
                          const resource::PriceBook& prices, double budget,
                          const fs::path& out_dir);

// Reads the plan and the test files and writes the report. Performance
// cases whose pattern is "@best" (the default) use out_dir/pattern.json.
verify::VerificationReport verify(const VerifySettings& settings,
                                  const fs::path& out_dir);

// Runs every stage. Returns the process exit code: 0 ready, 1 attention.
int run_all(PipelineConfig cfg);

inline int exit_code(const verify::VerificationReport& r) {
  return r.recommendation == verify::Recommendation::Ready ? 0 : 1;
}

// Artifact names inside the output directory.
inline constexpr const char* kLoopsFile = "loops.json";
inline constexpr const char* kPatternFile = "pattern.json";
inline constexpr const char* kSearchFile = "search.json";
inline constexpr const char* kPlanFile = "plan.json";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kReportText = "report.txt";
fs::path annotated_name(const fs::path& source);  // <stem>.acc.mc

io::Json plan_to_json(const resource::ResourceRatio& ratio,
                      const resource::Allocation& allocation, double t_cpu,
                      double t_dev, const resource::PriceBook& prices,
                      double budget);
io::Json report_to_json(const verify::VerificationReport& report);

}  // namespace offload::pipeline
