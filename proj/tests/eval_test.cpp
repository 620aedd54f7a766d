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

#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "offload/error.hpp"
#include "offload/evaluation.hpp"
#include "offload/process.hpp"
#include "support/corpus.hpp"
#include "support/random_program.hpp"
#include "support/two_space_oracle.hpp"

using namespace offload;
using namespace offload::eval;
using model::OffloadPattern;
using offload::testing::read_corpus;

namespace {

struct Program {
  minic::Ast ast;
  minic::LoopTable loops;
  explicit Program(const std::string& text)
      : ast(minic::parse_program(text)), loops(minic::extract_loops(ast)) {}
};

OffloadPattern bits_of(std::uint64_t mask, std::size_t n) {
  auto p = OffloadPattern::zeros(n);
  for (std::size_t i = 0; i < n; ++i) p.set(i, (mask >> i) & 1u);
  return p;
}

// Cost oracle driven by a run trace: loop entries, body executions and
// transfer firings are counted while executing the program, never derived
// from trip-count formulas.
double traced_cost(const Program& prog, const OffloadPattern& pattern,
                   const model::TransferPlan& plan,
                   const CostAnnotations& costs, double* dev_part = nullptr) {
  auto roots = model::offloaded_loops(pattern, prog.loops);
  auto trace = offload::testing::TwoSpaceOracle(
                   prog.ast, plan, {roots.begin(), roots.end()})
                   .run();
  const auto& g = costs.globals;
  auto work = [&](minic::NodeId id) {
    auto it = costs.loops.find(id);
    return it == costs.loops.end() ? costs.fallback->work : it->second.work;
  };
  auto speedup = [&](minic::NodeId id) {
    auto it = costs.loops.find(id);
    return it == costs.loops.end() ? costs.fallback->speedup
                                   : it->second.speedup;
  };
  double cpu = 0, dev = 0;
  for (const auto& l : prog.loops.loops()) {
    std::optional<minic::NodeId> root;
    for (auto r : roots)
      if (r == l.loop_id || prog.loops.is_ancestor(r, l.loop_id)) root = r;
    double units = double(trace.iterations[l.loop_id]) * work(l.loop_id);
    if (root)
      dev += units * g.tau_host / speedup(*root);
    else
      cpu += units * g.tau_host;
  }
  for (auto r : roots) dev += double(trace.entries[r]) * g.launch_overhead;
  dev += double(trace.transfers) * g.transfer_latency + trace.bytes / g.bandwidth;
  if (dev_part) *dev_part = dev;
  return cpu + dev;
}

CostAnnotations uniform_costs(double work, double speedup = 10) {
  CostAnnotations c;
  c.fallback = LoopCost{work, speedup};
  return c;
}

bool has_static_trips(const minic::LoopTable& t) {
  for (const auto& l : t.loops())
    if (!t.entry_count(l.loop_id) || !l.trip_count) return false;
  return true;
}

minic::ProgramOutput output_of(std::vector<double> values,
                               const std::string& name = "x") {
  minic::ProgramOutput out;
  out.variables.push_back({name, values.size() > 1, std::move(values)});
  return out;
}

}  // namespace

TEST_SUITE("evaluate_sim") {
  TEST_CASE("nothing offloaded costs only host time") {
    Program g3(read_corpus("g3.mc"));
    CostAnnotations c;
    c.loops = {{7, {10, 10}}, {10, {100000, 10}}, {13, {10, 10}}};
    auto p = OffloadPattern::zeros(3);
    auto m = evaluate_sim(g3.ast, g3.loops, p, model::plan_transfers(g3.ast, g3.loops, p), c);
    CHECK(m.valid);
    CHECK(m.t_dev == 0);
    CHECK(m.t_total == doctest::Approx(64 * (10 + 100000 + 10) * 1e-9).epsilon(1e-12));
    CHECK(m.t_total == m.t_cpu + m.t_dev);
  }

  TEST_CASE("single flat loop with one scalar in and one array out") {
    Program prog("float x = 2; float y[1000000]; int i;\n"
                 "for (i = 0; i < 1000000; i++) { y[i] = x; }\n");
    minic::NodeId loop = prog.loops.eligible_ids()[0];
    model::TransferPlan plan;
    plan.ops.push_back({"x", model::Direction::HostToDevice,
                        {loop, model::AnchorSide::Before}, loop, false, 8});
    plan.ops.push_back({"y", model::Direction::DeviceToHost,
                        {loop, model::AnchorSide::After}, loop, false, 8000000});
    CostAnnotations c;
    c.loops[loop] = {1, 10};
    auto m = evaluate_sim(prog.ast, prog.loops, OffloadPattern::parse("1"), plan, c);
    double expected = 1e-4 + 1e6 * 1e-9 / 10 + 2 * 1e-5 + (8 + 8e6) / 1e10;
    CHECK(m.t_dev == doctest::Approx(expected).epsilon(1e-12));
    CHECK(m.t_dev == doctest::Approx(1.0200008e-3).epsilon(1e-12));
    CHECK(m.t_cpu == 0);
  }

  TEST_CASE("fault injection marks the pattern invalid") {
    Program g3(read_corpus("g3.mc"));
    SimOptions opts;
    opts.fault_injection = {OffloadPattern::parse("010")};
    auto p = OffloadPattern::parse("010");
    auto m = evaluate_sim(g3.ast, g3.loops, p,
                          model::plan_transfers(g3.ast, g3.loops, p),
                          uniform_costs(1), opts);
    CHECK_FALSE(m.valid);
    CHECK(m.is_infinite());
    auto q = OffloadPattern::parse("011");
    CHECK(evaluate_sim(g3.ast, g3.loops, q,
                       model::plan_transfers(g3.ast, g3.loops, q),
                       uniform_costs(1), opts)
              .valid);
  }

  TEST_CASE("errors") {
    Program g3(read_corpus("g3.mc"));
    auto p = OffloadPattern::zeros(3);
    auto plan = model::plan_transfers(g3.ast, g3.loops, p);
    CostAnnotations partial;
    partial.loops[7] = {1, 10};
    CHECK_THROWS_AS(evaluate_sim(g3.ast, g3.loops, p, plan, partial),
                    MissingAnnotation);
    Program tri(read_corpus("triangular.mc"));
    auto tp = OffloadPattern::zeros(tri.loops.gene_length());
    CHECK_THROWS_AS(evaluate_sim(tri.ast, tri.loops, tp,
                                 model::plan_transfers(tri.ast, tri.loops, tp),
                                 uniform_costs(1)),
                    NonStaticTrip);
    Program nest(read_corpus("nest3.mc"));
    CHECK_THROWS_AS(evaluate_sim(nest.ast, nest.loops, OffloadPattern::parse("110"),
                                 {}, uniform_costs(1)),
                    InvalidPattern);
    CostAnnotations bad = uniform_costs(-1);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }

  TEST_CASE("agrees with the trace oracle on every pattern") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> work(0, 5000), speed(0.5, 40);
    for (const auto& name : offload::testing::corpus_programs()) {
      Program prog(read_corpus(name));
      if (!has_static_trips(prog.loops)) continue;
      CAPTURE(name);
      CostAnnotations c;
      for (const auto& l : prog.loops.loops())
        c.loops[l.loop_id] = {work(rng), speed(rng)};
      std::size_t a = prog.loops.gene_length();
      for (std::uint64_t mask = 0; mask < (1u << a); ++mask) {
        auto p = bits_of(mask, a);
        if (!model::validate_pattern(p, prog.loops)) continue;
        for (bool hoist : {true, false}) {
          auto plan = model::plan_transfers(prog.ast, prog.loops, p, {hoist});
          auto m = evaluate_sim(prog.ast, prog.loops, p, plan, c);
          double dev = 0;
          double want = traced_cost(prog, p, plan, c, &dev);
          CHECK(m.t_total == doctest::Approx(want).epsilon(1e-12));
          CHECK(m.t_dev == doctest::Approx(dev).epsilon(1e-12));
          CHECK(m.t_total == m.t_cpu + m.t_dev);
        }
      }
    }
  }

  TEST_CASE("more work never makes a pattern faster") {
    std::mt19937_64 rng(5);
    for (const auto& name : {"g3.mc", "g10.mc", "hoist.mc", "nest3.mc"}) {
      Program prog(read_corpus(name));
      std::size_t a = prog.loops.gene_length();
      for (int trial = 0; trial < 40; ++trial) {
        auto p = bits_of(rng(), a);
        if (!model::validate_pattern(p, prog.loops)) continue;
        auto plan = model::plan_transfers(prog.ast, prog.loops, p);
        CostAnnotations c;
        for (const auto& l : prog.loops.loops())
          c.loops[l.loop_id] = {double(rng() % 1000), 1 + double(rng() % 20)};
        double before = evaluate_sim(prog.ast, prog.loops, p, plan, c).t_total;
        auto& bump = c.loops[prog.loops.loops()[rng() % prog.loops.size()].loop_id];
        bump.work += double(1 + rng() % 1000);
        CHECK(evaluate_sim(prog.ast, prog.loops, p, plan, c).t_total >= before);
      }
    }
  }

  TEST_CASE("hoisting never raises the device part") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Program prog(offload::testing::RandomProgram(seed).generate());
      if (!has_static_trips(prog.loops)) continue;
      std::mt19937_64 rng(seed);
      auto p = bits_of(rng(), prog.loops.gene_length());
      if (!model::validate_pattern(p, prog.loops)) continue;
      auto c = uniform_costs(3);
      auto hoisted = evaluate_sim(prog.ast, prog.loops, p,
                                  model::plan_transfers(prog.ast, prog.loops, p), c);
      auto flat = evaluate_sim(prog.ast, prog.loops, p,
                               model::plan_transfers(prog.ast, prog.loops, p, {false}), c);
      CHECK(hoisted.t_dev <= flat.t_dev);
    }
  }
}

TEST_SUITE("evaluate_external") {
  ExternalArtifacts no_files() { return {"/dev/null", "/dev/null"}; }

  TEST_CASE("parses the final line") {
    auto m = evaluate_external("echo warming up; echo '12.5 10.0 2.5 1'", no_files(), 10);
    CHECK(m.valid);
    CHECK(m.t_total == 12.5);
    CHECK(m.t_cpu == 10.0);
    CHECK(m.t_dev == 2.5);
  }

  TEST_CASE("nonzero exit is an invalid measurement") {
    auto m = evaluate_external("echo '1 1 0 1'; exit 3", no_files(), 10);
    CHECK_FALSE(m.valid);
    CHECK_FALSE(m.timed_out);
  }

  TEST_CASE("malformed output and valid=0") {
    CHECK_FALSE(evaluate_external("echo fast", no_files(), 10).valid);
    CHECK_FALSE(evaluate_external("echo '1 1 0 2'", no_files(), 10).valid);
    CHECK_FALSE(evaluate_external("echo '1 1 0 0'", no_files(), 10).valid);
    CHECK_FALSE(evaluate_external("echo '1 1 0 1 extra'", no_files(), 10).valid);
    CHECK_FALSE(evaluate_external("true", no_files(), 10).valid);
  }

  TEST_CASE("timeout kills the command") {
    auto start = std::chrono::steady_clock::now();
    auto m = evaluate_external("sleep 20; echo '1 1 0 1'", no_files(), 0.3);
    double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK_FALSE(m.valid);
    CHECK(m.timed_out);
    CHECK(took < 5);
  }

  TEST_CASE("a command that cannot start is a spawn error") {
    CHECK_THROWS_AS(evaluate_external("/nonexistent/measure {source}", no_files(), 10),
                    SpawnError);
  }

  TEST_CASE("slots are substituted with quoted paths") {
    auto dir = std::filesystem::temp_directory_path() / "offload eval test";
    std::filesystem::create_directories(dir);
    auto src = dir / "it's.acc.mc";
    auto pat = dir / "pattern.json";
    std::ofstream(src) << "0.5 0.25 0.25 1\n";
    std::ofstream(pat) << "{}";
    auto m = evaluate_external("test -f {pattern} && cat {source}",
                               {src.string(), pat.string()}, 10);
    CHECK(m.valid);
    CHECK(m.t_total == 0.5);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("shell quoting round-trips through the shell") {
    for (std::string s : {"plain", "with space", "it's", "$HOME", "a\"b", ""}) {
      auto r = run_shell("printf %s " + shell_quote(s), 10);
      CHECK(r.output == s);
    }
  }
}

TEST_SUITE("compare_results") {
  TEST_CASE("identical outputs pass with zero deviation") {
    auto a = output_of({1, 2, 3});
    auto v = compare_results(a, a);
    CHECK(v.pass);
    REQUIRE(v.worst);
    CHECK(v.worst->deviation == 0);
  }

  TEST_CASE("one ulp apart") {
    auto x = output_of({1.0 + 0x1p-52});
    auto y = output_of({1.0});
    ToleranceSpec t;
    t.mode = ToleranceMode::Ulp;
    t.max_ulps = 1;
    CHECK(compare_results(x, y, t).pass);
    t.max_ulps = 0;
    auto v = compare_results(x, y, t);
    CHECK_FALSE(v.pass);
    CHECK(v.worst->deviation == 1);
  }

  TEST_CASE("relative bound") {
    ToleranceSpec t;
    t.rtol = 1e-6;
    t.atol = 0;
    auto v = compare_results(output_of({1.001}), output_of({1.0}), t);
    CHECK_FALSE(v.pass);
    CHECK(v.worst->deviation == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(compare_results(output_of({1.0000005}), output_of({1.0}), t).pass);
  }

  TEST_CASE("worst offender and per-variable worst") {
    minic::ProgramOutput a, b;
    a.variables = {{"p", true, {1, 2, 3}}, {"q", false, {10}}};
    b.variables = {{"p", true, {1, 2.5, 3}}, {"q", false, {10.1}}};
    ToleranceSpec t;
    t.mode = ToleranceMode::Absolute;
    t.atol = 0.2;
    auto v = compare_results(a, b, t);
    CHECK_FALSE(v.pass);
    CHECK(v.worst->variable == "p");
    CHECK(v.worst->index == 1);
    REQUIRE(v.per_variable.size() == 2);
    CHECK(v.per_variable[1].deviation == doctest::Approx(0.1));
  }

  TEST_CASE("NaN handling") {
    auto nan = std::numeric_limits<double>::quiet_NaN();
    CHECK(compare_results(output_of({nan}), output_of({nan})).pass);
    auto v = compare_results(output_of({nan}), output_of({1.0}));
    CHECK_FALSE(v.pass);
    CHECK(std::isinf(v.worst->deviation));
  }

  TEST_CASE("shape mismatch") {
    CHECK_THROWS_AS(compare_results(output_of({1, 2}), output_of({1, 2, 3})),
                    ShapeMismatch);
    CHECK_THROWS_AS(compare_results(output_of({1}, "x"), output_of({1}, "y")),
                    ShapeMismatch);
  }

  TEST_CASE("ulp distance matches a bit-pattern oracle") {
    // Same sign: difference of the magnitudes' bit patterns. Opposite
    // signs: the two distances to zero add up.
    auto oracle = [](double x, double y) -> std::uint64_t {
      auto mag = [](double v) {
        return std::bit_cast<std::uint64_t>(v) & ~(std::uint64_t{1} << 63);
      };
      if (std::signbit(x) == std::signbit(y))
        return mag(x) > mag(y) ? mag(x) - mag(y) : mag(y) - mag(x);
      return mag(x) + mag(y);
    };
    CHECK(ulp_distance(0.0, -0.0) == 0);
    CHECK(ulp_distance(1.0, std::nextafter(1.0, 2.0)) == 1);
    CHECK(ulp_distance(-1.0, std::nextafter(-1.0, 0.0)) == 1);
    CHECK(ulp_distance(std::numeric_limits<double>::denorm_min(),
                       -std::numeric_limits<double>::denorm_min()) == 2);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100000; ++i) {
      double x = std::bit_cast<double>(rng()), y = std::bit_cast<double>(rng());
      if (std::isnan(x) || std::isnan(y)) continue;
      if (i % 2) y = std::nextafter(x, y) * (i % 4 == 1 ? 1.0 : 1.0000001);
      CHECK(ulp_distance(x, y) == oracle(x, y));
    }
    // Stepping with nextafter counts ulps directly.
    double x = -3e-310;
    double y = x;
    for (int k = 1; k <= 1000; ++k) {
      y = std::nextafter(y, 1.0);
      REQUIRE(ulp_distance(x, y) == std::uint64_t(k));
    }
  }

  TEST_CASE("absolute and ulp verdicts are symmetric") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(-2, 2);
    for (int i = 0; i < 2000; ++i) {
      std::vector<double> xs, ys;
      for (int k = 0; k < 4; ++k) {
        double base = d(rng);
        xs.push_back(base);
        ys.push_back(i % 3 ? base + d(rng) * 1e-9 : std::nextafter(base, 5.0));
      }
      for (auto mode : {ToleranceMode::Absolute, ToleranceMode::Ulp}) {
        ToleranceSpec t;
        t.mode = mode;
        t.atol = 1e-9;
        t.max_ulps = 3;
        CHECK(compare_results(output_of(xs), output_of(ys), t).pass ==
              compare_results(output_of(ys), output_of(xs), t).pass);
      }
    }
  }

  TEST_CASE("tolerance validation") {
    ToleranceSpec t;
    t.atol = -1;
    CHECK_THROWS_AS(t.validate(), ConfigError);
    t = {};
    t.mode = ToleranceMode::Absolute;
    t.atol = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(t.validate(), ConfigError);
    t = {};
    CHECK_NOTHROW(t.validate());
  }
}
