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

#include <algorithm>
#include <map>

#include "offload/model.hpp"

namespace offload::model {

namespace {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (;;) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      return lines;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

struct Directive {
  std::size_t depth;
  int rank;  // data before kernels on the same loop
  std::size_t order;
  std::string text;
};

}  // namespace

AnnotatedSource emit_annotated(const minic::Ast& ast,
                               const minic::LoopTable& loops,
                               const OffloadPattern& pattern,
                               const TransferPlan& plan) {
  std::map<std::size_t, std::vector<Directive>> before, after;
  std::size_t order = 0;

  // One data line per (anchor, direction), variables in plan order.
  struct Group {
    Anchor anchor;
    Direction direction;
    std::vector<std::string> vars;
  };
  std::vector<Group> groups;
  for (const auto& op : plan.ops) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.anchor == op.anchor && g.direction == op.direction;
    });
    if (it == groups.end()) {
      groups.push_back({op.anchor, op.direction, {}});
      it = std::prev(groups.end());
    }
    if (std::find(it->vars.begin(), it->vars.end(), op.variable) ==
        it->vars.end())
      it->vars.push_back(op.variable);
  }

  for (const auto& g : groups) {
    const auto& loop = loops.at(g.anchor.loop);
    std::string text = "#pragma acc data ";
    text += g.direction == Direction::HostToDevice ? "copyin(" : "copyout(";
    for (std::size_t i = 0; i < g.vars.size(); ++i) {
      if (i) text += ", ";
      text += g.vars[i];
    }
    text += ")";
    if (g.anchor.side == AnchorSide::Before)
      before[loop.begin.line].push_back({loop.depth, 0, order++, text});
    else
      after[loop.end.line].push_back({loop.depth, 0, order++, text});
  }
  for (NodeId id : offloaded_loops(pattern, loops)) {
    const auto& loop = loops.at(id);
    before[loop.begin.line].push_back(
        {loop.depth, 1, order++, "#pragma acc kernels"});
  }

  auto lines = split_lines(ast.source);
  std::vector<std::string> out;
  out.reserve(lines.size() + order);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::size_t line_no = i + 1;
    if (auto it = before.find(line_no); it != before.end()) {
      auto& ds = it->second;
      std::stable_sort(ds.begin(), ds.end(), [](const auto& a, const auto& b) {
        return std::tie(a.depth, a.rank, a.order) <
               std::tie(b.depth, b.rank, b.order);
      });
      for (const auto& d : ds) out.push_back(d.text);
    }
    out.push_back(lines[i]);
    if (auto it = after.find(line_no); it != after.end()) {
      auto& ds = it->second;
      std::stable_sort(ds.begin(), ds.end(), [](const auto& a, const auto& b) {
        if (a.depth != b.depth) return a.depth > b.depth;
        return a.order < b.order;
      });
      for (const auto& d : ds) out.push_back(d.text);
    }
  }
  return {join_lines(out)};
}

std::string strip_directives(std::string_view text) {
  auto lines = split_lines(text);
  std::vector<std::string> kept;
  for (auto& l : lines)
    if (l.rfind("#pragma", 0) != 0) kept.push_back(std::move(l));
  return join_lines(kept);
}

}  // namespace offload::model
