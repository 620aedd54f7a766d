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

#include <set>

#include "doctest.h"
#include "offload/error.hpp"
#include "offload/verification.hpp"
#include "support/corpus.hpp"

using namespace offload;
using namespace offload::verify;
using offload::testing::read_corpus;

namespace {

eval::Measurement split(double cpu, double dev) {
  eval::Measurement m;
  m.t_cpu = cpu;
  m.t_dev = dev;
  m.t_total = cpu + dev;
  return m;
}

TestCase sim_case(const std::string& name, const std::string& program,
                  const std::string& bits) {
  TestCase tc;
  tc.name = name;
  tc.kind = TestKind::Performance;
  tc.source = read_corpus(program);
  tc.baseline = read_corpus(program);
  tc.pattern = model::OffloadPattern::parse(bits);
  return tc;
}

TestCase regression(const std::string& name, const std::string& cmd) {
  TestCase tc;
  tc.name = name;
  tc.command = cmd;
  return tc;
}

const resource::Allocation kTwoOne{2, 1, 6000, true};

}  // namespace

TEST_CASE("scaled time and readiness for a clean sim case") {
  auto report = run_verification(kTwoOne, split(10, 5),
                                 {sim_case("nest", "nest3.mc", "010")}, {}, {});
  REQUIRE(report.performance.size() == 1);
  const auto& p = report.performance[0];
  CHECK(p.pass);
  CHECK(p.scaled_time == 10.0);  // 10/2 + 5/1
  CHECK(p.throughput == 0.1);
  REQUIRE(p.diff);
  CHECK(p.diff->worst->deviation == 0);
  CHECK(report.recommendation == Recommendation::Ready);
  CHECK(report.allocation.monthly_cost == 6000);
}

TEST_CASE("failing regression command needs attention") {
  auto report = run_verification(kTwoOne, split(10, 5),
                                 {regression("ok", "true"), regression("bad", "exit 1")},
                                 {}, {});
  REQUIRE(report.regression.size() == 2);
  CHECK(report.regression[0].pass);
  CHECK_FALSE(report.regression[1].pass);
  CHECK(report.regression[1].exit_code == 1);
  CHECK(report.recommendation == Recommendation::Attention);
}

TEST_CASE("components missing from the registry are listed, not failed") {
  SoftwareRegistry reg{{"libm", {"true", "test 1 -eq 1"}}};
  auto report = run_verification(kTwoOne, split(10, 5), {}, reg, {"libm", "openmp"});
  CHECK(report.uncovered_components == std::vector<std::string>{"openmp"});
  REQUIRE(report.regression.size() == 2);
  CHECK(report.regression[0].name == "libm#1");
  CHECK(report.regression[0].component == "libm");
  CHECK(report.recommendation == Recommendation::Ready);
}

TEST_CASE("a performance case without a baseline is a configuration error") {
  auto tc = sim_case("x", "g3.mc", "010");
  tc.baseline.reset();
  CHECK_THROWS_AS(run_verification(kTwoOne, split(1, 1), {tc}, {}, {}), ConfigError);
}

TEST_CASE("result differences fail the case") {
  auto tc = sim_case("drift", "g3.mc", "010");
  auto text = *tc.baseline;
  text.replace(text.find("i * 0.5"), 7, "i * 0.51");
  tc.baseline = text;
  auto report = run_verification(kTwoOne, split(1, 1), {tc}, {}, {});
  CHECK_FALSE(report.performance[0].pass);
  REQUIRE(report.performance[0].diff);
  bool a_differs = false;
  for (const auto& d : report.performance[0].diff->per_variable)
    if (d.variable == "a") a_differs = d.deviation > 0;
  CHECK(a_differs);
  CHECK(report.recommendation == Recommendation::Attention);
}

TEST_CASE("a broken case is recorded, not thrown") {
  auto tc = sim_case("nested", "nest3.mc", "110");
  auto report = run_verification(kTwoOne, split(1, 1), {tc}, {}, {});
  CHECK_FALSE(report.performance[0].pass);
  CHECK(report.performance[0].note.find("InvalidPattern") != std::string::npos);
}

TEST_CASE("external performance case: the valid flag is the diff verdict") {
  TestCase good;
  good.name = "ext";
  good.kind = TestKind::Performance;
  good.baseline = "float x;";
  good.command = "test -s {baseline} && echo '4 2 2 1'";
  auto bad = good;
  bad.name = "ext-bad";
  bad.command = "echo '4 2 2 0'";
  auto report = run_verification(kTwoOne, split(10, 5), {good, bad}, {}, {});
  CHECK(report.performance[0].pass);
  CHECK(report.performance[0].scaled_time == 3.0);  // 2/2 + 2/1
  CHECK_FALSE(report.performance[1].pass);
}

TEST_CASE("every case appears once, in input order, with any worker count") {
  std::vector<TestCase> tests;
  for (int i = 0; i < 12; ++i) {
    if (i % 3 == 0)
      tests.push_back(sim_case("perf" + std::to_string(i), "g10.mc", "0110000101"));
    else
      tests.push_back(regression("reg" + std::to_string(i),
                                 i % 4 == 1 ? "sleep 0.05; exit 2" : "sleep 0.05"));
  }
  VerifyOptions serial, parallel;
  parallel.workers = 6;
  auto a = run_verification(kTwoOne, split(4, 2), tests, {}, {}, serial);
  auto b = run_verification(kTwoOne, split(4, 2), tests, {}, {}, parallel);
  CHECK(render_text(a) == render_text(b));
  std::vector<std::string> names;
  for (const auto& p : a.performance) names.push_back(p.name);
  for (const auto& r : a.regression) names.push_back(r.name);
  CHECK(names.size() == tests.size());
  std::set<std::string> unique(names.begin(), names.end());
  CHECK(unique.size() == tests.size());
  CHECK(a.performance[1].name == "perf3");
  CHECK(a.regression[0].name == "reg1");
}

TEST_CASE("more units never raise the scaled time") {
  auto m = split(3.5, 1.25);
  for (std::uint64_t c = 1; c < 8; ++c)
    for (std::uint64_t g = 1; g < 8; ++g) {
      resource::Allocation base{c, g, 0, true}, more_c{c + 1, g, 0, true},
          more_g{c, g + 1, 0, true};
      CHECK(scaled_time(m, more_c) <= scaled_time(m, base));
      CHECK(scaled_time(m, more_g) <= scaled_time(m, base));
    }
}

TEST_CASE("text rendering carries the price and the recommendation") {
  auto report = run_verification(kTwoOne, split(10, 5), {regression("bad", "false")},
                                 {}, {"gpu-driver"});
  auto text = render_text(report);
  CHECK(text.find("Monthly price: 6000") != std::string::npos);
  CHECK(text.find("Uncovered components: gpu-driver") != std::string::npos);
  CHECK(text.find("Recommendation: attention") != std::string::npos);
}
