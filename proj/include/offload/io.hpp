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

// JSON file contracts shared by the pipeline stages.

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "offload/evaluation.hpp"
#include "offload/ga.hpp"
#include "offload/minic.hpp"
#include "offload/model.hpp"

namespace offload::io {

using Json = nlohmann::json;
namespace fs = std::filesystem;

// Throw ConfigError when the file cannot be read or parsed.
std::string read_text(const fs::path& path);
Json read_json(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);
// Two-space indentation and a trailing newline; keys come out sorted.
std::string dump(const Json& value);
void write_json(const fs::path& path, const Json& value);

// {"<loop id>": {"work": w, "speedup": s}, ..., "globals": {...},
//  "default": {...}}
eval::CostAnnotations costs_from_json(const Json& j);
eval::CostAnnotations load_costs(const fs::path& path);

Json loops_to_json(const minic::LoopTable& loops);

// {"bits": [0, 1, ...], "loop_ids": [...]}
Json pattern_to_json(const model::OffloadPattern& pattern,
                     const minic::LoopTable& loops);
// Checks that the loop ids match the table. Throws ConfigError.
model::OffloadPattern pattern_from_json(const Json& j,
                                        const minic::LoopTable& loops);

// Times are numbers, or the string INFINITE_TIME for invalid measurements.
Json measurement_to_json(const eval::Measurement& m);
eval::Measurement measurement_from_json(const Json& j);

Json tolerance_to_json(const eval::ToleranceSpec& t);
eval::ToleranceSpec tolerance_from_json(const Json& j,
                                        eval::ToleranceSpec base = {});

Json ga_config_to_json(const ga::GaConfig& cfg);
// Missing keys keep the values of `base`.
ga::GaConfig ga_config_from_json(const Json& j, ga::GaConfig base = {});

Json search_to_json(const ga::SearchResult& result, const ga::GaConfig& cfg);

// Numbers written to JSON round-trip exactly; non-finite values become
// strings ("inf", "-inf", "nan").
Json number(double value);
double number_from_json(const Json& j);

}  // namespace offload::io
