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
#include <set>

#include "offload/error.hpp"
#include "offload/model.hpp"

namespace offload::model {

namespace {

using minic::Assign;
using minic::Block;
using minic::Call;
using minic::Expr;
using minic::ForLoop;
using minic::Stmt;
using VarSet = std::set<std::string>;

void reads_of(const Expr& e, VarSet& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, minic::VarRead>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, minic::ArrayRead>) {
          out.insert(n.name);
          reads_of(*n.index, out);
        } else if constexpr (std::is_same_v<T, minic::Binary>) {
          reads_of(*n.lhs, out);
          reads_of(*n.rhs, out);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& a : n.args) reads_of(a, out);
        }
      },
      e.node);
}

struct Effects {
  VarSet reads;
  VarSet writes;
};

// Reads and writes of `s` including loop headers, skipping the subtree
// rooted at `skip`.
void effects_of(const Stmt& s, std::optional<NodeId> skip, Effects& fx) {
  if (skip && s.id == *skip) return;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Assign>) {
          fx.writes.insert(n.target);
          if (n.index) reads_of(*n.index, fx.reads);
          reads_of(n.value, fx.reads);
        } else if constexpr (std::is_same_v<T, ForLoop>) {
          reads_of(n.init, fx.reads);
          reads_of(n.bound, fx.reads);
          fx.reads.insert(n.cond_var);
          fx.reads.insert(n.step_var);
          fx.writes.insert(n.init_var);
          fx.writes.insert(n.step_var);
          effects_of(*n.body, skip, fx);
        } else if constexpr (std::is_same_v<T, Block>) {
          for (const auto& c : n.stmts) effects_of(c, skip, fx);
        } else {
          for (const auto& a : n.args) reads_of(a, fx.reads);
        }
      },
      s.node);
}

// Upward-exposed reads and definitely-written scalars of a statement run in
// order. `defined` holds the scalars written so far on every path.
class Liveness {
 public:
  explicit Liveness(const minic::LoopTable& loops) : loops_(loops) {}

  void run(const Stmt& s, VarSet& defined, VarSet& exposed) const {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign>) {
            VarSet r;
            if (n.index) reads_of(*n.index, r);
            reads_of(n.value, r);
            expose(r, defined, exposed);
            if (!n.index) defined.insert(n.target);
          } else if constexpr (std::is_same_v<T, ForLoop>) {
            VarSet r;
            reads_of(n.init, r);
            expose(r, defined, exposed);
            defined.insert(n.init_var);
            r.clear();
            reads_of(n.bound, r);
            r.insert(n.cond_var);
            expose(r, defined, exposed);
            const auto* info = loops_.find(s.id);
            bool runs = info && info->trip_count.value_or(0) >= 1;
            VarSet scratch = defined;
            VarSet& body_defined = runs ? defined : scratch;
            run(*n.body, body_defined, exposed);
            expose({n.step_var}, body_defined, exposed);
            body_defined.insert(n.step_var);
          } else if constexpr (std::is_same_v<T, Block>) {
            for (const auto& c : n.stmts) run(c, defined, exposed);
          } else {
            VarSet r;
            for (const auto& a : n.args) reads_of(a, r);
            expose(r, defined, exposed);
          }
        },
        s.node);
  }

 private:
  static void expose(const VarSet& reads, const VarSet& defined,
                     VarSet& exposed) {
    for (const auto& v : reads)
      if (!defined.count(v)) exposed.insert(v);
  }

  const minic::LoopTable& loops_;
};

std::map<NodeId, const Stmt*> loop_statements(const minic::Ast& ast) {
  std::map<NodeId, const Stmt*> out;
  for (const Stmt* s : minic::collect_loops(ast)) out.emplace(s->id, s);
  return out;
}

}  // namespace

TransferPlan plan_transfers(const minic::Ast& ast,
                            const minic::LoopTable& loops,
                            const OffloadPattern& pattern,
                            const PlanOptions& options) {
  auto verdict = validate_pattern(pattern, loops);
  if (!verdict) throw InvalidPattern(verdict.reason);

  auto statements = loop_statements(ast);
  Liveness liveness(loops);
  TransferPlan plan;

  for (NodeId root : offloaded_loops(pattern, loops)) {
    const Stmt& region = *statements.at(root);

    Effects fx;
    effects_of(region, std::nullopt, fx);
    VarSet defined, exposed;
    liveness.run(region, defined, exposed);

    VarSet copy_in = exposed;
    for (const auto& v : fx.writes)
      if (!defined.count(v)) copy_in.insert(v);
    const VarSet& copy_out = fx.writes;

    auto place = [&](const std::string& var, Direction dir) {
      TransferOp op;
      op.variable = var;
      op.direction = dir;
      op.region = root;
      op.anchor = {root, dir == Direction::HostToDevice ? AnchorSide::Before
                                                        : AnchorSide::After};
      op.bytes = ast.find_symbol(var)->bytes();
      if (options.hoist) {
        for (NodeId outer : loops.ancestors(root)) {
          if (loops.at(outer).trip_count.value_or(0) < 1) break;
          Effects cpu;
          effects_of(*statements.at(outer), root, cpu);
          bool blocked = cpu.writes.count(var) ||
                         (dir == Direction::DeviceToHost && cpu.reads.count(var));
          if (blocked) break;
          op.anchor.loop = outer;
          op.hoisted = true;
        }
      }
      plan.ops.push_back(std::move(op));
    };

    for (const auto& v : copy_in) place(v, Direction::HostToDevice);
    for (const auto& v : copy_out) place(v, Direction::DeviceToHost);
  }
  return plan;
}

std::int64_t executed_transfer_count(const TransferPlan& plan,
                                     const minic::LoopTable& loops) {
  std::int64_t total = 0;
  for (const auto& op : plan.ops) {
    auto n = loops.entry_count(op.anchor.loop);
    if (!n)
      throw NonStaticTrip("transfer anchored at loop " +
                          std::to_string(op.anchor.loop) +
                          " runs a non-static number of times");
    total += *n;
  }
  return total;
}

}  // namespace offload::model
