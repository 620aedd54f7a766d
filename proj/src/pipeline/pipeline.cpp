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

#include "offload/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <set>
#include <sstream>

#include "offload/error.hpp"

namespace offload::pipeline {

namespace {

using io::Json;

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

fs::path existing(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) throw ConfigError(what + " '" + p.string() + "' does not exist");
  return p;
}

template <typename T>
T get(const Json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(where + ": bad or missing '" + key + "'");
  }
}

double parse_number(const std::string& text, const std::string& what) {
  double v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ConfigError(what + ": '" + text + "' is not a number");
  return v;
}

struct Program {
  std::string text;
  minic::Ast ast;
  minic::LoopTable loops;

  explicit Program(const fs::path& source)
      : text(io::read_text(source)),
        ast(minic::parse_program(text)),
        loops(minic::extract_loops(ast)) {}
};

model::OffloadPattern parse_bits(const std::string& bits,
                                 const minic::LoopTable& loops) {
  model::OffloadPattern p;
  try {
    p = model::OffloadPattern::parse(bits);
  } catch (const std::invalid_argument&) {
    throw ConfigError("'" + bits + "' is not a bit string");
  }
  if (p.size() != loops.gene_length())
    throw ConfigError("pattern '" + bits + "' has " + std::to_string(p.size()) +
                      " bits, the program has " +
                      std::to_string(loops.gene_length()) + " eligible loops");
  return p;
}

Json diff_to_json(const eval::DiffVerdict& d) {
  auto dev = [](const eval::Deviation& x) {
    return Json{{"variable", x.variable},
                {"index", x.index},
                {"actual", io::number(x.actual)},
                {"baseline", io::number(x.baseline)},
                {"deviation", io::number(x.deviation)}};
  };
  Json per = Json::array();
  for (const auto& x : d.per_variable) per.push_back(dev(x));
  return {{"pass", d.pass},
          {"worst", d.worst ? dev(*d.worst) : Json(nullptr)},
          {"per_variable", per}};
}

std::vector<verify::TestCase> load_tests(const fs::path& file,
                                         const eval::ToleranceSpec& tolerance,
                                         const fs::path& out_dir) {
  Json j = io::read_json(file);
  if (!j.is_array()) throw ConfigError(file.string() + ": expected a list of test cases");
  fs::path dir = file.parent_path();
  std::vector<verify::TestCase> tests;
  std::set<std::string> names;
  for (const auto& e : j) {
    std::string where = file.string();
    if (!e.is_object()) throw ConfigError(where + ": test case must be an object");
    for (const auto& [key, value] : e.items()) {
      static const std::set<std::string> known{"name", "kind", "source", "baseline",
                                               "pattern", "command", "tolerance"};
      if (!known.count(key)) throw ConfigError(where + ": unknown test key '" + key + "'");
    }
    verify::TestCase tc;
    tc.name = get<std::string>(e, "name", where);
    where += " case '" + tc.name + "'";
    if (!names.insert(tc.name).second)
      throw ConfigError(where + ": duplicate test name");
    auto kind = get<std::string>(e, "kind", where);
    if (kind == "performance")
      tc.kind = verify::TestKind::Performance;
    else if (kind == "regression")
      tc.kind = verify::TestKind::Regression;
    else
      throw ConfigError(where + ": kind must be performance or regression");
    if (e.contains("command")) tc.command = get<std::string>(e, "command", where);
    if (e.contains("baseline"))
      tc.baseline = io::read_text(
          existing(resolve(dir, get<std::string>(e, "baseline", where)), "baseline"));
    tc.tolerance = e.contains("tolerance")
                       ? io::tolerance_from_json(e["tolerance"], tolerance)
                       : tolerance;
    if (e.contains("source")) {
      auto src = existing(resolve(dir, get<std::string>(e, "source", where)), "source");
      Program prog(src);
      tc.source = prog.text;
      std::string pattern = e.contains("pattern")
                                ? get<std::string>(e, "pattern", where)
                                : std::string("@best");
      if (pattern == "@best")
        tc.pattern = io::pattern_from_json(io::read_json(out_dir / kPatternFile),
                                           prog.loops);
      else if (pattern.find_first_not_of("01") == std::string::npos)
        tc.pattern = parse_bits(pattern, prog.loops);
      else
        tc.pattern = io::pattern_from_json(
            io::read_json(existing(resolve(dir, pattern), "pattern")), prog.loops);
    }
    tests.push_back(std::move(tc));
  }
  return tests;
}

verify::SoftwareRegistry load_registry(const fs::path& file) {
  Json j = io::read_json(file);
  if (!j.is_object()) throw ConfigError(file.string() + ": expected an object");
  verify::SoftwareRegistry reg;
  for (const auto& [name, cmds] : j.items()) {
    try {
      reg[name] = cmds.get<std::vector<std::string>>();
    } catch (const Json::exception&) {
      throw ConfigError(file.string() + ": '" + name + "' must list commands");
    }
  }
  return reg;
}

}  // namespace

fs::path annotated_name(const fs::path& source) {
  return source.stem().string() + ".acc.mc";
}

void apply_seed_override(ga::GaConfig& cfg) {
  const char* env = std::getenv("OFFLOAD_SEED");
  if (!env) return;
  std::string text(env);
  std::uint64_t seed = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size())
    throw ConfigError("OFFLOAD_SEED must be an unsigned integer, got '" + text + "'");
  cfg.seed = seed;
}

ga::GaConfig parse_ga_overrides(const std::string& text, ga::GaConfig base) {
  Json j = Json::object();
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--ga expects key=value, got '" + item + "'");
    std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    if (key == "seed") {
      std::uint64_t seed = 0;
      auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc() || end != value.data() + value.size())
        throw ConfigError("--ga seed must be an unsigned integer");
      j[key] = seed;
    } else if (key == "crossover_rate" || key == "mutation_rate_per_bit") {
      j[key] = parse_number(value, "--ga " + key);
    } else {
      std::uint64_t n = 0;
      auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
      if (ec != std::errc() || end != value.data() + value.size())
        throw ConfigError("--ga " + key + " must be a non-negative integer");
      j[key] = n;
    }
  }
  return io::ga_config_from_json(j, base);
}

PipelineConfig load_config(const fs::path& path) {
  Json j = io::read_json(path);
  if (!j.is_object()) throw ConfigError(path.string() + ": expected an object");
  static const std::set<std::string> known{
      "source", "costs", "backend", "command", "timeout", "ga", "prices", "budget",
      "tests", "registry", "components", "tolerance", "output_dir",
      "concurrency", "fault_injection"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError(path.string() + ": unknown key '" + key + "'");

  const std::string where = path.string();
  fs::path dir = path.parent_path();
  PipelineConfig cfg;
  auto& s = cfg.search;
  s.source = existing(resolve(dir, get<std::string>(j, "source", where)), "source");
  std::string backend = j.contains("backend") ? get<std::string>(j, "backend", where) : "sim";
  if (backend == "sim")
    s.backend = Backend::Sim;
  else if (backend == "external")
    s.backend = Backend::External;
  else
    throw ConfigError(where + ": backend must be sim or external");
  if (j.contains("costs"))
    s.costs = existing(resolve(dir, get<std::string>(j, "costs", where)), "costs");
  if (j.contains("command")) s.command = get<std::string>(j, "command", where);
  if (s.backend == Backend::Sim && !s.costs)
    throw ConfigError(where + ": the sim backend needs 'costs'");
  if (s.backend == Backend::External && !s.command)
    throw ConfigError(where + ": the external backend needs 'command'");
  if (j.contains("timeout")) s.timeout_seconds = get<double>(j, "timeout", where);
  if (!(s.timeout_seconds > 0)) throw ConfigError(where + ": timeout must be positive");
  if (j.contains("ga")) s.ga = io::ga_config_from_json(j["ga"]);
  if (j.contains("concurrency")) s.concurrency = get<std::size_t>(j, "concurrency", where);
  if (j.contains("fault_injection"))
    s.fault_injection = get<std::vector<std::string>>(j, "fault_injection", where);

  Json prices = j.contains("prices") ? j["prices"] : Json::object();
  cfg.prices = {get<double>(prices, "cpu", where + " prices"),
                get<double>(prices, "dev", where + " prices")};
  cfg.prices.validate();
  cfg.budget = get<double>(j, "budget", where);

  auto& v = cfg.verify;
  if (j.contains("tests"))
    v.tests = existing(resolve(dir, get<std::string>(j, "tests", where)), "tests");
  if (j.contains("registry"))
    v.registry = existing(resolve(dir, get<std::string>(j, "registry", where)), "registry");
  if (j.contains("components"))
    v.components = get<std::vector<std::string>>(j, "components", where);
  if (j.contains("tolerance")) v.tolerance = io::tolerance_from_json(j["tolerance"]);
  v.timeout_seconds = s.timeout_seconds;
  v.concurrency = s.concurrency;

  cfg.output_dir = resolve(dir, j.contains("output_dir")
                                    ? get<std::string>(j, "output_dir", where)
                                    : std::string("out"));
  return cfg;
}

void analyze(const fs::path& source, const std::optional<fs::path>& costs,
             const fs::path& out_dir) {
  Program prog(source);
  Json j = io::loops_to_json(prog.loops);
  if (costs) {
    auto c = io::load_costs(*costs);
    auto& list = j["loops"];
    for (auto& entry : list) {
      auto id = entry["id"].get<minic::NodeId>();
      auto it = c.loops.find(id);
      if (it != c.loops.end())
        entry["cost"] = {{"work", it->second.work}, {"speedup", it->second.speedup}};
      else if (c.fallback)
        entry["cost"] = {{"work", c.fallback->work}, {"speedup", c.fallback->speedup}};
      else if (entry["eligible"].get<bool>())
        throw MissingAnnotation("no cost annotation for eligible loop " + std::to_string(id));
      else
        entry["cost"] = nullptr;
    }
  }
  io::write_json(out_dir / kLoopsFile, j);
}

eval::Measurement search(const SearchSettings& s, const fs::path& out_dir) {
  Program prog(s.source);
  eval::SimOptions sim_opts;
  for (const auto& bits : s.fault_injection)
    sim_opts.fault_injection.push_back(parse_bits(bits, prog.loops));

  ga::Evaluator evaluate;
  std::optional<eval::CostAnnotations> costs;
  if (s.backend == Backend::Sim) {
    if (!s.costs) throw ConfigError("the sim backend needs a cost annotation file");
    costs = io::load_costs(*s.costs);
    evaluate = [&](const model::OffloadPattern& p) {
      return eval::evaluate_sim(prog.ast, prog.loops, p,
                                model::plan_transfers(prog.ast, prog.loops, p),
                                *costs, sim_opts);
    };
  } else {
    if (!s.command) throw ConfigError("the external backend needs a command");
    evaluate = [&](const model::OffloadPattern& p) {
      if (std::count(sim_opts.fault_injection.begin(), sim_opts.fault_injection.end(), p))
        return eval::Measurement::infinite("fault injection");
      auto plan = model::plan_transfers(prog.ast, prog.loops, p);
      fs::path dir = out_dir / "candidates";
      std::string bits = p.to_string();
      fs::path src = dir / (bits + ".acc.mc"), pat = dir / (bits + ".pattern.json");
      io::write_text(src, model::emit_annotated(prog.ast, prog.loops, p, plan).text);
      io::write_json(pat, io::pattern_to_json(p, prog.loops));
      return eval::evaluate_external(*s.command, {src.string(), pat.string()},
                                     s.timeout_seconds);
    };
  }

  auto result = ga::run_ga(prog.loops, evaluate, s.ga, {s.concurrency});
  const auto& best = result.best.pattern;
  auto plan = model::plan_transfers(prog.ast, prog.loops, best);

  io::write_json(out_dir / kPatternFile, io::pattern_to_json(best, prog.loops));
  io::write_text(out_dir / annotated_name(s.source),
                 model::emit_annotated(prog.ast, prog.loops, best, plan).text);
  Json j = io::search_to_json(result, s.ga);
  j["backend"] = s.backend == Backend::Sim ? "sim" : "external";
  Json ops = Json::array();
  for (const auto& op : plan.ops)
    ops.push_back({{"variable", op.variable},
                   {"direction", op.direction == model::Direction::HostToDevice
                                     ? "copyin" : "copyout"},
                   {"anchor", {{"loop", op.anchor.loop},
                               {"side", op.anchor.side == model::AnchorSide::Before
                                            ? "before" : "after"}}},
                   {"region", op.region},
                   {"hoisted", op.hoisted},
                   {"bytes", op.bytes}});
  j["transfers"] = ops;
  io::write_json(out_dir / kSearchFile, j);
  return *result.best.measurement;
}

io::Json plan_to_json(const resource::ResourceRatio& ratio,
                      const resource::Allocation& a, double t_cpu, double t_dev,
                      const resource::PriceBook& prices, double budget) {
  return {{"ratio", {{"cpu", ratio.cpu}, {"dev", ratio.dev}, {"cpu_only", ratio.cpu_only}}},
          {"allocation", {{"cpu_units", a.cpu_units},
                          {"dev_units", a.dev_units},
                          {"monthly_cost", a.monthly_cost},
                          {"ratio_kept", a.ratio_kept}}},
          {"inputs", {{"t_cpu", t_cpu},
                      {"t_dev", t_dev},
                      {"prices", {{"cpu", prices.cpu_unit_price},
                                  {"dev", prices.dev_unit_price}}},
                      {"budget", budget}}}};
}

resource::Allocation plan(double t_cpu, double t_dev,
                          const resource::PriceBook& prices, double budget,
                          const fs::path& out_dir) {
  auto ratio = resource::compute_ratio(t_cpu, t_dev);
  auto allocation = resource::plan_amount(ratio, prices, budget);
  io::write_json(out_dir / kPlanFile,
                 plan_to_json(ratio, allocation, t_cpu, t_dev, prices, budget));
  return allocation;
}

io::Json report_to_json(const verify::VerificationReport& r) {
  Json perf = Json::array();
  for (const auto& p : r.performance) {
    perf.push_back({{"name", p.name},
                    {"pass", p.pass},
                    {"scaled_time", io::number(p.scaled_time)},
                    {"throughput", io::number(p.throughput)},
                    {"diff", p.diff ? diff_to_json(*p.diff) : Json(nullptr)},
                    {"measurement", p.measurement ? io::measurement_to_json(*p.measurement)
                                                  : Json(nullptr)},
                    {"note", p.note}});
  }
  Json regr = Json::array();
  for (const auto& x : r.regression)
    regr.push_back({{"name", x.name},
                    {"component", x.component},
                    {"command", x.command},
                    {"pass", x.pass},
                    {"exit_code", x.exit_code},
                    {"timed_out", x.timed_out},
                    {"note", x.note}});
  const auto& a = r.allocation;
  return {{"allocation", {{"cpu_units", a.cpu_units},
                          {"dev_units", a.dev_units},
                          {"monthly_cost", a.monthly_cost},
                          {"ratio_kept", a.ratio_kept}}},
          {"monthly_price", a.monthly_cost},
          {"measurement", io::measurement_to_json(r.measurement)},
          {"model", "part times scale linearly with the number of units on their side"},
          {"performance", perf},
          {"regression", regr},
          {"uncovered_components", r.uncovered_components},
          {"recommendation",
           r.recommendation == verify::Recommendation::Ready ? "ready" : "attention"}};
}

verify::VerificationReport verify(const VerifySettings& s, const fs::path& out_dir) {
  Json plan_json = io::read_json(s.plan_file);
  resource::Allocation allocation;
  eval::Measurement m;
  try {
    const auto& a = plan_json.at("allocation");
    allocation = {a.at("cpu_units").get<std::uint64_t>(),
                  a.at("dev_units").get<std::uint64_t>(),
                  a.at("monthly_cost").get<double>(), a.at("ratio_kept").get<bool>()};
    const auto& in = plan_json.at("inputs");
    m.t_cpu = in.at("t_cpu").get<double>();
    m.t_dev = in.at("t_dev").get<double>();
    m.t_total = m.t_cpu + m.t_dev;
  } catch (const Json::exception& e) {
    throw ConfigError(s.plan_file.string() + ": " + e.what());
  }
  std::vector<verify::TestCase> tests;
  if (s.tests) tests = load_tests(*s.tests, s.tolerance, out_dir);
  verify::SoftwareRegistry registry;
  if (s.registry) registry = load_registry(*s.registry);

  verify::VerifyOptions opts;
  opts.timeout_seconds = s.timeout_seconds;
  opts.workers = s.concurrency;
  opts.artifacts = {(out_dir / "candidates" / "none").string(),
                    (out_dir / kPatternFile).string()};
  auto report = verify::run_verification(allocation, m, tests, registry,
                                         s.components, opts);
  io::write_json(out_dir / kReportFile, report_to_json(report));
  io::write_text(out_dir / kReportText, verify::render_text(report));
  return report;
}

int run_all(PipelineConfig cfg) {
  apply_seed_override(cfg.search.ga);
  const auto& out = cfg.output_dir;
  analyze(cfg.search.source, cfg.search.costs, out);
  auto best = search(cfg.search, out);
  if (!best.valid)
    throw ConfigError("no offload pattern produced a valid measurement");
  plan(best.t_cpu, best.t_dev, cfg.prices, cfg.budget, out);
  cfg.verify.plan_file = out / kPlanFile;
  return exit_code(verify(cfg.verify, out));
}

}  // namespace offload::pipeline
