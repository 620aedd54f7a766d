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
#include <cmath>
#include <limits>

#include "offload/error.hpp"
#include "offload/evaluation.hpp"

namespace offload::eval {

void ToleranceSpec::validate() const {
  if (!(atol >= 0) || !(rtol >= 0))
    throw ConfigError("tolerance bounds must be non-negative");
  bool finite = mode == ToleranceMode::Ulp ||
                std::isfinite(atol) ||
                (mode == ToleranceMode::Relative && std::isfinite(rtol));
  if (!finite) throw ConfigError("tolerance needs at least one finite bound");
}

namespace {

// Maps the bit pattern onto a line where adjacent doubles are adjacent
// integers and both zeros meet at 0.
std::int64_t ordered(double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  constexpr std::uint64_t sign = std::uint64_t{1} << 63;
  if (bits & sign) return -static_cast<std::int64_t>(bits & ~sign);
  return static_cast<std::int64_t>(bits);
}

}  // namespace

std::uint64_t ulp_distance(double x, double y) {
  std::int64_t a = ordered(x), b = ordered(y);
  return a >= b ? std::uint64_t(a) - std::uint64_t(b)
                : std::uint64_t(b) - std::uint64_t(a);
}

DiffVerdict compare_results(const minic::ProgramOutput& actual,
                            const minic::ProgramOutput& baseline,
                            const ToleranceSpec& tol) {
  if (actual.variables.size() != baseline.variables.size())
    throw ShapeMismatch("outputs have different variable counts");
  constexpr double inf = std::numeric_limits<double>::infinity();

  DiffVerdict verdict;
  for (const auto& want : baseline.variables) {
    const auto* got = actual.find(want.name);
    if (!got) throw ShapeMismatch("variable '" + want.name + "' is missing");
    if (got->values.size() != want.values.size())
      throw ShapeMismatch("variable '" + want.name + "' has " +
                          std::to_string(got->values.size()) +
                          " elements, expected " +
                          std::to_string(want.values.size()));
    Deviation worst{want.name, 0, 0, 0, 0};
    bool have_worst = false;
    for (std::size_t k = 0; k < want.values.size(); ++k) {
      double x = got->values[k], y = want.values[k];
      double dev = 0;
      bool ok = true;
      if (std::isnan(x) || std::isnan(y)) {
        ok = std::isnan(x) && std::isnan(y);
        dev = ok ? 0 : inf;
      } else if (tol.mode == ToleranceMode::Ulp) {
        auto d = ulp_distance(x, y);
        dev = double(d);
        ok = d <= tol.max_ulps;
      } else {
        dev = x == y ? 0 : std::fabs(x - y);
        double bound = tol.mode == ToleranceMode::Absolute
                           ? tol.atol
                           : tol.atol + tol.rtol * std::fabs(y);
        ok = dev <= bound;
      }
      if (!ok) verdict.pass = false;
      if (!have_worst || dev > worst.deviation) {
        worst = {want.name, k, x, y, dev};
        have_worst = true;
      }
    }
    if (!have_worst) continue;
    if (!verdict.worst || worst.deviation > verdict.worst->deviation)
      verdict.worst = worst;
    verdict.per_variable.push_back(std::move(worst));
  }
  return verdict;
}

}  // namespace offload::eval
