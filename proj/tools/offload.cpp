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

// Command-line front end for the offload planner.
//
//   offload analyze <src> [--costs F] [-o DIR]
//   offload search <src> --costs F [--backend sim|external --cmd TPL] [--ga k=v,...] [-o DIR]
//   offload plan --measure T_CPU,T_DEV --price-cpu P --price-dev P --budget B [-o DIR]
//   offload verify --plan F --tests F --registry F [-o DIR]
//   offload run-all --config F [-o DIR]
//
// Exit status: 0 when the report recommends the plan, 1 when it needs
// attention, 2 on configuration errors and infeasible budgets.

#include <charconv>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "offload/error.hpp"
#include "offload/pipeline.hpp"

namespace {

namespace pl = offload::pipeline;
namespace fs = std::filesystem;

double to_double(const std::string& text, const std::string& what) {
  double v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size())
    throw offload::ConfigError(what + ": '" + text + "' is not a number");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    if (comma > start) out.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loop offload planner: analyze, search, plan, verify"};
  app.require_subcommand(1);
  std::string out_dir = "out";

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Write the loop table (loops.json)");
  std::string a_source, a_costs;
  analyze->add_option("source", a_source, "MiniC program")->required()->check(CLI::ExistingFile);
  analyze->add_option("--costs", a_costs, "Cost annotations to check")->check(CLI::ExistingFile);
  analyze->add_option("-o,--output", out_dir, "Output directory");

  // search
  auto* search = app.add_subcommand("search", "Search offload patterns with the GA");
  pl::SearchSettings s;
  std::string s_source, s_costs, s_backend = "sim", s_cmd, s_ga, s_fault;
  search->add_option("source", s_source, "MiniC program")->required()->check(CLI::ExistingFile);
  search->add_option("--costs", s_costs, "Cost annotations (sim backend)")->check(CLI::ExistingFile);
  search->add_option("--backend", s_backend, "sim or external")
      ->check(CLI::IsMember({"sim", "external"}));
  search->add_option("--cmd", s_cmd, "Measurement command template (external backend)");
  search->add_option("--ga", s_ga, "GA overrides, e.g. population_size=8,seed=3");
  search->add_option("--timeout", s.timeout_seconds, "Seconds per measurement")
      ->check(CLI::PositiveNumber);
  search->add_option("--concurrency", s.concurrency, "Parallel measurements");
  search->add_option("--fault", s_fault, "Comma-separated patterns forced invalid");
  search->add_option("-o,--output", out_dir, "Output directory");

  // plan
  auto* plan = app.add_subcommand("plan", "Size CPU and device units (plan.json)");
  std::string p_measure, p_cpu, p_dev, p_budget;
  plan->add_option("--measure", p_measure, "T_CPU,T_DEV in seconds")->required();
  plan->add_option("--price-cpu", p_cpu, "Monthly price of one CPU unit")->required();
  plan->add_option("--price-dev", p_dev, "Monthly price of one device unit")->required();
  plan->add_option("--budget", p_budget, "Monthly budget")->required();
  plan->add_option("-o,--output", out_dir, "Output directory");

  // verify
  auto* verify = app.add_subcommand("verify", "Run verification cases (report.json, report.txt)");
  pl::VerifySettings v;
  std::string v_plan, v_tests, v_registry, v_components;
  double v_timeout = v.timeout_seconds;
  verify->add_option("--plan", v_plan, "plan.json")->required()->check(CLI::ExistingFile);
  verify->add_option("--tests", v_tests, "Test case list")->check(CLI::ExistingFile);
  verify->add_option("--registry", v_registry, "Component regression commands")
      ->check(CLI::ExistingFile);
  verify->add_option("--components", v_components, "Comma-separated components in use");
  verify->add_option("--timeout", v_timeout, "Seconds per case")->check(CLI::PositiveNumber);
  verify->add_option("--concurrency", v.concurrency, "Cases run at once");
  verify->add_option("-o,--output", out_dir, "Output directory");

  // run-all
  auto* run_all = app.add_subcommand("run-all", "Run every stage from a config file");
  std::string r_config;
  bool r_has_out = false;
  run_all->add_option("--config", r_config, "Pipeline config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* r_out = run_all->add_option("-o,--output", out_dir, "Output directory (overrides config)");

  CLI11_PARSE(app, argc, argv);
  r_has_out = r_out->count() > 0;

  try {
    if (*analyze) {
      std::optional<fs::path> costs;
      if (!a_costs.empty()) costs = a_costs;
      pl::analyze(a_source, costs, out_dir);
      return 0;
    }
    if (*search) {
      s.source = s_source;
      if (!s_costs.empty()) s.costs = s_costs;
      s.backend = s_backend == "sim" ? pl::Backend::Sim : pl::Backend::External;
      if (!s_cmd.empty()) s.command = s_cmd;
      s.ga = pl::parse_ga_overrides(s_ga, s.ga);
      pl::apply_seed_override(s.ga);
      s.fault_injection = split_list(s_fault);
      auto best = pl::search(s, out_dir);
      std::cout << "best t_total " << best.t_total << " s\n";
      return 0;
    }
    if (*plan) {
      auto parts = split_list(p_measure);
      if (parts.size() != 2)
        throw offload::ConfigError("--measure expects T_CPU,T_DEV");
      offload::resource::PriceBook prices{to_double(p_cpu, "--price-cpu"),
                                          to_double(p_dev, "--price-dev")};
      auto a = pl::plan(to_double(parts[0], "--measure"), to_double(parts[1], "--measure"),
                        prices, to_double(p_budget, "--budget"), out_dir);
      std::cout << "cpu units " << a.cpu_units << ", device units " << a.dev_units
                << ", monthly cost " << a.monthly_cost << "\n";
      return 0;
    }
    if (*verify) {
      v.plan_file = v_plan;
      if (!v_tests.empty()) v.tests = v_tests;
      if (!v_registry.empty()) v.registry = v_registry;
      v.components = split_list(v_components);
      v.timeout_seconds = v_timeout;
      auto report = pl::verify(v, out_dir);
      std::cout << offload::verify::render_text(report);
      return pl::exit_code(report);
    }
    auto cfg = pl::load_config(r_config);
    if (r_has_out) cfg.output_dir = out_dir;
    int code = pl::run_all(cfg);
    std::cout << offload::io::read_text(cfg.output_dir / pl::kReportText);
    return code;
  } catch (const offload::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return 2;
  }
}
