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

#include <charconv>
#include <cmath>
#include <sstream>

#include "offload/error.hpp"
#include "offload/evaluation.hpp"
#include "offload/process.hpp"

namespace offload::eval {

namespace {

void replace_all(std::string& s, std::string_view slot,
                 const std::string& value) {
  for (auto pos = s.find(slot); pos != std::string::npos;
       pos = s.find(slot, pos + value.size()))
    s.replace(pos, slot.size(), value);
}

bool parse_double(std::string_view token, double& out) {
  auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && end == token.data() + token.size();
}

}  // namespace

std::string expand_command(const std::string& command_template,
                           const ExternalArtifacts& artifacts) {
  std::string cmd = command_template;
  replace_all(cmd, "{source}", shell_quote(artifacts.source_path));
  replace_all(cmd, "{pattern}", shell_quote(artifacts.pattern_path));
  return cmd;
}

std::optional<Measurement> parse_measurement_line(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::string tok[4], extra;
  if (!(in >> tok[0] >> tok[1] >> tok[2] >> tok[3]) || (in >> extra))
    return std::nullopt;
  Measurement m;
  if (!parse_double(tok[0], m.t_total) || !parse_double(tok[1], m.t_cpu) ||
      !parse_double(tok[2], m.t_dev))
    return std::nullopt;
  if (tok[3] == "0") return Measurement::infinite("command reported invalid");
  if (tok[3] != "1") return std::nullopt;
  for (double t : {m.t_total, m.t_cpu, m.t_dev})
    if (!(t >= 0) || !std::isfinite(t)) return std::nullopt;
  return m;
}

Measurement evaluate_external(const std::string& command_template,
                              const ExternalArtifacts& artifacts,
                              double timeout_seconds) {
  auto result = run_shell(expand_command(command_template, artifacts),
                          timeout_seconds);
  if (result.timed_out)
    return Measurement::infinite(
        "timed out after " + std::to_string(timeout_seconds) + " s", true);
  if (result.exit_code != 0)
    return Measurement::infinite("command exited with status " +
                                 std::to_string(result.exit_code));
  std::string_view out = result.output;
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r' ||
                          out.back() == ' ' || out.back() == '\t'))
    out.remove_suffix(1);
  auto nl = out.rfind('\n');
  std::string_view last = nl == std::string_view::npos ? out : out.substr(nl + 1);
  auto m = parse_measurement_line(last);
  if (!m)
    return Measurement::infinite("unparseable measurement line: '" +
                                 std::string(last) + "'");
  return *m;
}

}  // namespace offload::eval
