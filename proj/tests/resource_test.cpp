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

#include <random>

#include "doctest.h"
#include "offload/error.hpp"
#include "offload/resource.hpp"
#include "support/planner_oracle.hpp"

using namespace offload;
using namespace offload::resource;

TEST_SUITE("compute_ratio") {
  TEST_CASE("examples") {
    CHECK(compute_ratio(10, 5) == ResourceRatio{2, 1, false});
    CHECK(compute_ratio(7, 7) == ResourceRatio{1, 1, false});
    CHECK(compute_ratio(5, 12) == ResourceRatio{1, 2, false});
    CHECK(compute_ratio(5, 0).cpu_only);
  }

  TEST_CASE("half rounds up") {
    CHECK(compute_ratio(2.5, 1) == ResourceRatio{3, 1, false});
    CHECK(compute_ratio(1, 2.5) == ResourceRatio{1, 3, false});
    CHECK(compute_ratio(1.49, 1) == ResourceRatio{1, 1, false});
    CHECK(round_half_up(0.5) == 1);
    CHECK(round_half_up(3.4999) == 3);
  }

  TEST_CASE("scale invariance") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> t(0.01, 100);
    // Powers of two scale without rounding, so the quotient is unchanged.
    for (int i = 0; i < 1000; ++i) {
      double a = t(rng), b = t(rng);
      for (double s : {0.25, 2.0, 1024.0})
        CHECK(compute_ratio(a, b) == compute_ratio(a * s, b * s));
    }
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(compute_ratio(0, 1), NonPositiveTime);
    CHECK_THROWS_AS(compute_ratio(-1, 1), NonPositiveTime);
    CHECK_THROWS_AS(compute_ratio(1, -0.5), NonPositiveTime);
  }
}

TEST_SUITE("plan_amount") {
  const PriceBook book{1000, 4000};

  TEST_CASE("examples") {
    CHECK(plan_amount({2, 1}, book, 10000) == Allocation{2, 1, 6000, true});
    CHECK(plan_amount({2, 1}, book, 5000) == Allocation{1, 1, 5000, false});
    CHECK(plan_amount({2, 1}, book, 13000) == Allocation{4, 2, 12000, true});
  }

  TEST_CASE("infeasible budget") {
    CHECK_THROWS_AS(plan_amount({2, 1}, book, 4999), Infeasible);
    CHECK_THROWS_AS(plan_amount(ResourceRatio::cpu_only_marker(), book, 999),
                    Infeasible);
  }

  TEST_CASE("CPU-only allocation") {
    auto a = plan_amount(ResourceRatio::cpu_only_marker(), book, 3500);
    CHECK(a == Allocation{3, 0, 3000, true});
  }

  TEST_CASE("maximality and budget safety") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 2000; ++i) {
      ResourceRatio r = rng() % 2 ? ResourceRatio{1 + rng() % 6, 1, false}
                                  : ResourceRatio{1, 1 + rng() % 6, false};
      PriceBook p{double(1 + rng() % 50), double(1 + rng() % 50)};
      double budget = double(rng() % 2000);
      try {
        auto a = plan_amount(r, p, budget);
        CHECK(a.monthly_cost <= budget);
        CHECK(a.monthly_cost == a.cpu_units * p.cpu_unit_price +
                                    a.dev_units * p.dev_unit_price);
        if (a.ratio_kept)
          CHECK((a.cpu_units + r.cpu) * p.cpu_unit_price +
                    (a.dev_units + r.dev) * p.dev_unit_price > budget);
      } catch (const Infeasible&) {
        CHECK(p.cpu_unit_price + p.dev_unit_price > budget);
      }
    }
  }

  TEST_CASE("matches exhaustive enumeration") {
    std::mt19937_64 rng(3);
    int checked = 0;
    for (int i = 0; i < 3000; ++i) {
      auto inst = offload::testing::random_planner_instance(rng);
      auto want = offload::testing::enumerate_allocation(inst);
      CAPTURE(inst.describe());
      if (!want) {
        CHECK_THROWS_AS(plan_amount(inst.ratio, inst.prices, inst.budget), Infeasible);
      } else {
        CHECK(plan_amount(inst.ratio, inst.prices, inst.budget) == *want);
        ++checked;
      }
    }
    CHECK(checked > 2000);
  }

  TEST_CASE("fallback search cap") {
    CHECK_THROWS_AS(plan_amount({1000000000, 1}, {1, 1}, 5e8), CapExceeded);
  }

  TEST_CASE("balance of ratio-kept allocations") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> t(0.001, 50);
    for (int i = 0; i < 1000; ++i) {
      double tc = t(rng), td = t(rng);
      auto r = compute_ratio(tc, td);
      auto a = plan_amount(r, {1, 1}, double(r.cpu + r.dev) * double(1 + rng() % 5));
      REQUIRE(a.ratio_kept);
      double q = (tc / double(a.cpu_units)) / (td / double(a.dev_units));
      CHECK(q >= 2.0 / 3.0);
      CHECK(q <= 1.5);
    }
  }
}
