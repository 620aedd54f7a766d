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
#include <fstream>
#include <limits>
#include <sstream>

#include "offload/error.hpp"
#include "offload/io.hpp"

namespace offload::io {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(text.data(), std::streamsize(text.size()));
}

std::string dump(const Json& value) { return value.dump(2) + "\n"; }

void write_json(const fs::path& path, const Json& value) {
  write_text(path, dump(value));
}

Json number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError("expected a number, found " + j.dump());
}

namespace {

template <typename T>
T field(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "': " +
                      j.at(key).dump());
  }
}

void require_object(const Json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
}

eval::LoopCost loop_cost(const Json& j, eval::LoopCost base = {}) {
  require_object(j, "cost entry");
  base.work = field(j, "work", base.work);
  base.speedup = field(j, "speedup", base.speedup);
  return base;
}

}  // namespace

eval::CostAnnotations costs_from_json(const Json& j) {
  require_object(j, "cost annotations");
  eval::CostAnnotations c;
  for (const auto& [key, value] : j.items()) {
    if (key == "globals") {
      require_object(value, "globals");
      auto& g = c.globals;
      g.tau_host = field(value, "tau_host", g.tau_host);
      g.launch_overhead = field(value, "launch_overhead", g.launch_overhead);
      g.bandwidth = field(value, "bandwidth", g.bandwidth);
      g.transfer_latency = field(value, "transfer_latency", g.transfer_latency);
    } else if (key == "default") {
      c.fallback = loop_cost(value);
    } else {
      std::size_t used = 0;
      unsigned long id = 0;
      try {
        id = std::stoul(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size() || key.empty())
        throw ConfigError("cost key '" + key + "' is not a loop id");
      c.loops[minic::NodeId(id)] = loop_cost(value);
    }
  }
  c.validate();
  return c;
}

eval::CostAnnotations load_costs(const fs::path& path) {
  return costs_from_json(read_json(path));
}

Json loops_to_json(const minic::LoopTable& loops) {
  Json list = Json::array();
  for (const auto& l : loops.loops()) {
    Json e;
    e["id"] = l.loop_id;
    e["parent"] = l.parent ? Json(*l.parent) : Json(nullptr);
    e["depth"] = l.depth;
    e["trip_count"] = l.trip_count ? Json(*l.trip_count) : Json(nullptr);
    e["eligible"] = l.eligible;
    e["reason"] = l.reason ? Json(*l.reason) : Json(nullptr);
    e["index_var"] = l.index_var;
    e["defs"] = l.defs;
    e["uses"] = l.uses;
    e["line"] = l.begin.line;
    e["end_line"] = l.end.line;
    list.push_back(std::move(e));
  }
  return {{"loops", list}, {"eligible_ids", loops.eligible_ids()}};
}

Json pattern_to_json(const model::OffloadPattern& pattern,
                     const minic::LoopTable& loops) {
  Json bits = Json::array();
  for (bool b : pattern.bits()) bits.push_back(b ? 1 : 0);
  return {{"bits", bits}, {"loop_ids", loops.eligible_ids()}};
}

model::OffloadPattern pattern_from_json(const Json& j,
                                        const minic::LoopTable& loops) {
  require_object(j, "pattern");
  auto ids = field(j, "loop_ids", std::vector<minic::NodeId>{});
  if (ids != loops.eligible_ids())
    throw ConfigError("pattern loop_ids do not match the program's eligible loops");
  auto raw = field(j, "bits", std::vector<int>{});
  std::vector<bool> bits;
  for (int b : raw) {
    if (b != 0 && b != 1) throw ConfigError("pattern bits must be 0 or 1");
    bits.push_back(b == 1);
  }
  if (bits.size() != ids.size())
    throw ConfigError("pattern has " + std::to_string(bits.size()) +
                      " bits for " + std::to_string(ids.size()) + " loops");
  return model::OffloadPattern(std::move(bits));
}

Json measurement_to_json(const eval::Measurement& m) {
  Json j;
  j["valid"] = m.valid;
  if (m.valid) {
    j["t_total"] = number(m.t_total);
    j["t_cpu"] = number(m.t_cpu);
    j["t_dev"] = number(m.t_dev);
  } else {
    j["t_total"] = std::string(eval::kInfiniteTime);
    j["t_cpu"] = nullptr;
    j["t_dev"] = nullptr;
    j["note"] = m.note;
    j["timed_out"] = m.timed_out;
  }
  return j;
}

eval::Measurement measurement_from_json(const Json& j) {
  require_object(j, "measurement");
  if (!field(j, "valid", false) ||
      (j.contains("t_total") && j["t_total"] == std::string(eval::kInfiniteTime)))
    return eval::Measurement::infinite(field(j, "note", std::string("invalid")),
                                       field(j, "timed_out", false));
  eval::Measurement m;
  try {
    m.t_total = number_from_json(j.at("t_total"));
    m.t_cpu = number_from_json(j.at("t_cpu"));
    m.t_dev = number_from_json(j.at("t_dev"));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("measurement: ") + e.what());
  }
  return m;
}

Json tolerance_to_json(const eval::ToleranceSpec& t) {
  const char* mode = t.mode == eval::ToleranceMode::Absolute   ? "absolute"
                     : t.mode == eval::ToleranceMode::Relative ? "relative"
                                                               : "ulp";
  return {{"mode", mode},
          {"atol", number(t.atol)},
          {"rtol", number(t.rtol)},
          {"max_ulps", t.max_ulps}};
}

eval::ToleranceSpec tolerance_from_json(const Json& j,
                                        eval::ToleranceSpec base) {
  require_object(j, "tolerance");
  if (j.contains("mode")) {
    auto mode = field(j, "mode", std::string());
    if (mode == "absolute")
      base.mode = eval::ToleranceMode::Absolute;
    else if (mode == "relative")
      base.mode = eval::ToleranceMode::Relative;
    else if (mode == "ulp")
      base.mode = eval::ToleranceMode::Ulp;
    else
      throw ConfigError("unknown tolerance mode '" + mode + "'");
  }
  if (j.contains("atol")) base.atol = number_from_json(j["atol"]);
  if (j.contains("rtol")) base.rtol = number_from_json(j["rtol"]);
  base.max_ulps = field(j, "max_ulps", base.max_ulps);
  base.validate();
  return base;
}

Json ga_config_to_json(const ga::GaConfig& cfg) {
  return {{"population_size", cfg.population_size},
          {"generations", cfg.generations},
          {"crossover_rate", cfg.crossover_rate},
          {"mutation_rate_per_bit", cfg.mutation_rate_per_bit},
          {"elite_count", cfg.elite_count},
          {"seed", cfg.seed}};
}

ga::GaConfig ga_config_from_json(const Json& j, ga::GaConfig base) {
  require_object(j, "ga");
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"population_size", "generations",
                                  "crossover_rate", "mutation_rate_per_bit",
                                  "elite_count", "seed"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw ConfigError("unknown ga key '" + key + "'");
  }
  base.population_size = field(j, "population_size", base.population_size);
  base.generations = field(j, "generations", base.generations);
  base.crossover_rate = field(j, "crossover_rate", base.crossover_rate);
  base.mutation_rate_per_bit =
      field(j, "mutation_rate_per_bit", base.mutation_rate_per_bit);
  base.elite_count = field(j, "elite_count", base.elite_count);
  base.seed = field(j, "seed", base.seed);
  base.validate();
  return base;
}

Json search_to_json(const ga::SearchResult& result, const ga::GaConfig& cfg) {
  Json history = Json::array();
  for (std::size_t g = 0; g < result.history.size(); ++g)
    history.push_back({{"generation", g},
                       {"best_fitness", number(result.history[g].best)},
                       {"mean_fitness", number(result.history[g].mean)}});
  Json best;
  best["pattern"] = result.best.pattern.to_string();
  best["fitness"] = number(result.best.fitness.value_or(0));
  best["measurement"] = result.best.measurement
                            ? measurement_to_json(*result.best.measurement)
                            : Json(nullptr);
  return {{"best", best},
          {"history", history},
          {"evaluations", result.evaluations},
          {"ga", ga_config_to_json(cfg)}};
}

}  // namespace offload::io
