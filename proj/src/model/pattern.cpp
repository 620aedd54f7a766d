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

#include <stdexcept>

#include "offload/error.hpp"
#include "offload/model.hpp"

namespace offload::model {

OffloadPattern OffloadPattern::parse(std::string_view text) {
  std::vector<bool> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("pattern must consist of 0 and 1, got '" +
                                  std::string(text) + "'");
    bits.push_back(c == '1');
  }
  return OffloadPattern(std::move(bits));
}

std::string OffloadPattern::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (bool b : bits_) s += b ? '1' : '0';
  return s;
}

std::vector<NodeId> offloaded_loops(const OffloadPattern& pattern,
                                    const minic::LoopTable& loops) {
  const auto& ids = loops.eligible_ids();
  if (pattern.size() != ids.size())
    throw LengthMismatch("pattern has " + std::to_string(pattern.size()) +
                         " bits but the program has " +
                         std::to_string(ids.size()) + " eligible loops");
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (pattern[i]) out.push_back(ids[i]);
  return out;
}

PatternVerdict validate_pattern(const OffloadPattern& pattern,
                                const minic::LoopTable& loops) {
  auto chosen = offloaded_loops(pattern, loops);
  for (NodeId inner : chosen) {
    for (NodeId outer : chosen) {
      if (outer != inner && loops.is_ancestor(outer, inner)) {
        return {false,
                "loop " + std::to_string(inner) +
                    " is nested inside offloaded loop " +
                    std::to_string(outer),
                std::make_pair(outer, inner)};
      }
    }
  }
  return {};
}

}  // namespace offload::model
