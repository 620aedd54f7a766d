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

// Running shell commands with a wall-clock limit.

#include <string>
#include <string_view>

namespace offload {

struct ProcessResult {
  int exit_code = -1;  // -1 when killed by a signal or by the timeout
  bool timed_out = false;
  std::string output;  // everything the command wrote to stdout
};

// Single-quotes `text` for /bin/sh.
std::string shell_quote(std::string_view text);

// Runs `command` through /bin/sh -c in its own process group, with stdin
// from /dev/null and stderr discarded. When the timeout expires the whole
// group is killed. Throws SpawnError when the shell cannot be started or
// reports that the command itself could not be found or executed (126/127).
ProcessResult run_shell(const std::string& command, double timeout_seconds);

}  // namespace offload
