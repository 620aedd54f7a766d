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

#include <map>
#include <set>

#include "offload/model.hpp"

namespace offload::model {

namespace {

constexpr std::size_t kHost = 0;
constexpr std::size_t kDevice = 1;

class TransferHooks : public minic::ExecutionHooks {
 public:
  TransferHooks(const minic::Ast& ast, const std::vector<NodeId>& roots,
                const TransferPlan& plan)
      : roots_(roots.begin(), roots.end()) {
    for (const auto& op : plan.ops) {
      Slot slot = static_cast<Slot>(ast.find_symbol(op.variable) -
                                    ast.symbols.data());
      auto& list = op.anchor.side == AnchorSide::Before
                       ? before_[op.anchor.loop]
                       : after_[op.anchor.loop];
      list.push_back({slot, op.direction, op.bytes});
    }
  }

  void before_loop(const minic::Stmt& loop, minic::Machine& m) override {
    if (auto it = before_.find(loop.id); it != before_.end())
      for (const auto& c : it->second) apply(c, m);
    if (roots_.count(loop.id)) m.activate(kDevice);
  }

  void after_loop(const minic::Stmt& loop, minic::Machine& m) override {
    if (roots_.count(loop.id)) m.activate(kHost);
    if (auto it = after_.find(loop.id); it != after_.end())
      for (const auto& c : it->second) apply(c, m);
  }

  std::int64_t transfers = 0;
  std::uint64_t bytes = 0;

 private:
  using Slot = minic::Slot;
  struct Copy {
    Slot slot;
    Direction direction;
    std::uint64_t bytes;
  };

  void apply(const Copy& c, minic::Machine& m) {
    auto& host = m.space(kHost)[c.slot];
    auto& dev = m.space(kDevice)[c.slot];
    if (c.direction == Direction::HostToDevice)
      dev = host;
    else
      host = dev;
    ++transfers;
    bytes += c.bytes;
  }

  std::set<NodeId> roots_;
  std::map<NodeId, std::vector<Copy>> before_;
  std::map<NodeId, std::vector<Copy>> after_;
};

}  // namespace

OffloadRun execute_offloaded(const minic::Ast& ast,
                             const minic::LoopTable& loops,
                             const OffloadPattern& pattern,
                             const TransferPlan& plan,
                             std::uint64_t iteration_cap) {
  TransferHooks hooks(ast, offloaded_loops(pattern, loops), plan);
  minic::InterpretOptions opts;
  opts.iteration_cap = iteration_cap;
  opts.memory_spaces = 2;
  opts.hooks = &hooks;
  OffloadRun run;
  run.output = minic::interpret(ast, opts);
  run.transfers = hooks.transfers;
  run.bytes = hooks.bytes;
  return run;
}

}  // namespace offload::model
