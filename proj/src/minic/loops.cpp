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
#include <cmath>
#include <map>
#include <stdexcept>

#include "offload/error.hpp"
#include "offload/minic.hpp"

namespace offload::minic {

namespace {

void expr_reads(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarRead>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, ArrayRead>) {
          out.insert(n.name);
          expr_reads(*n.index, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          expr_reads(*n.lhs, out);
          expr_reads(*n.rhs, out);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& a : n.args) expr_reads(a, out);
        }
      },
      e.node);
}

void header_reads(const ForLoop& f, std::set<std::string>& out) {
  expr_reads(f.init, out);
  expr_reads(f.bound, out);
  out.insert(f.cond_var);
  out.insert(f.step_var);
}

void stmt_accesses(const Stmt& s, std::set<std::string>& defs,
                   std::set<std::string>& uses) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Assign>) {
          defs.insert(n.target);
          if (n.index) expr_reads(*n.index, uses);
          expr_reads(n.value, uses);
        } else if constexpr (std::is_same_v<T, ForLoop>) {
          defs.insert(n.init_var);
          defs.insert(n.step_var);
          header_reads(n, uses);
          stmt_accesses(*n.body, defs, uses);
        } else if constexpr (std::is_same_v<T, Block>) {
          for (const auto& c : n.stmts) stmt_accesses(c, defs, uses);
        } else {
          for (const auto& a : n.args) expr_reads(a, uses);
        }
      },
      s.node);
}

bool expr_has_unknown_call(const Expr& e, std::string& name) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ArrayRead>) {
          return expr_has_unknown_call(*n.index, name);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return expr_has_unknown_call(*n.lhs, name) ||
                 expr_has_unknown_call(*n.rhs, name);
        } else if constexpr (std::is_same_v<T, Call>) {
          if (!n.intrinsic) {
            name = n.callee;
            return true;
          }
          for (const auto& a : n.args)
            if (expr_has_unknown_call(a, name)) return true;
          return false;
        } else {
          return false;
        }
      },
      e.node);
}

bool stmt_has_unknown_call(const Stmt& s, std::string& name) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Assign>) {
          return (n.index && expr_has_unknown_call(*n.index, name)) ||
                 expr_has_unknown_call(n.value, name);
        } else if constexpr (std::is_same_v<T, ForLoop>) {
          return expr_has_unknown_call(n.init, name) ||
                 expr_has_unknown_call(n.bound, name) ||
                 stmt_has_unknown_call(*n.body, name);
        } else if constexpr (std::is_same_v<T, Block>) {
          for (const auto& c : n.stmts)
            if (stmt_has_unknown_call(c, name)) return true;
          return false;
        } else {
          return expr_has_unknown_call(Expr{n, {}}, name);
        }
      },
      s.node);
}

// Scalars whose value is fixed before any loop runs: never written, or
// written exactly once by a constant initializer or a constant top-level
// assignment. `assigned_at` is the node id of that single write.
class StaticValues {
 public:
  explicit StaticValues(const Ast& ast) : ast_(ast) {
    for (const auto& item : ast.items) {
      if (const auto* d = std::get_if<Decl>(&item)) {
        if (d->init) count_write(d->name, d->id, &*d->init, true);
      } else {
        count_stmt(std::get<Stmt>(item), true);
      }
    }
  }

  // Value of `e` as seen by a statement with node id `at`, if static.
  std::optional<double> eval(const Expr& e, NodeId at) const {
    return std::visit(
        [&](const auto& n) -> std::optional<double> {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Number>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, VarRead>) {
            return value_of(n.name, at);
          } else if constexpr (std::is_same_v<T, Binary>) {
            auto l = eval(*n.lhs, at);
            auto r = eval(*n.rhs, at);
            if (!l || !r) return std::nullopt;
            switch (n.op) {
              case BinaryOp::Add:
                return *l + *r;
              case BinaryOp::Sub:
                return *l - *r;
              case BinaryOp::Mul:
                return *l * *r;
              case BinaryOp::Div:
                if (*r == 0.0) return std::nullopt;
                return *l / *r;
            }
            return std::nullopt;
          } else if constexpr (std::is_same_v<T, Call>) {
            if (!n.intrinsic) return std::nullopt;
            auto a = eval(n.args[0], at);
            if (!a) return std::nullopt;
            if (n.callee == "sin") return std::sin(*a);
            if (n.callee == "cos") return std::cos(*a);
            return std::sqrt(*a);
          } else {
            return std::nullopt;
          }
        },
        e.node);
  }

 private:
  struct Writes {
    int count = 0;
    NodeId at = 0;
    const Expr* value = nullptr;  // set for a single static-candidate write
    bool top_level = false;
  };

  void count_write(const std::string& name, NodeId at, const Expr* value,
                   bool top_level) {
    auto& w = writes_[name];
    ++w.count;
    w.at = at;
    w.value = value;
    w.top_level = top_level;
  }

  void count_stmt(const Stmt& s, bool top_level) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign>) {
            count_write(n.target, s.id, n.index ? nullptr : &n.value,
                        top_level);
          } else if constexpr (std::is_same_v<T, ForLoop>) {
            count_write(n.init_var, s.id, nullptr, false);
            count_write(n.step_var, s.id, nullptr, false);
            count_stmt(*n.body, false);
          } else if constexpr (std::is_same_v<T, Block>) {
            for (const auto& c : n.stmts) count_stmt(c, top_level);
          }
        },
        s.node);
  }

  std::optional<double> value_of(const std::string& name, NodeId at) const {
    const Symbol* sym = ast_.find_symbol(name);
    if (!sym || sym->is_array()) return std::nullopt;
    auto it = writes_.find(name);
    if (it == writes_.end()) return 0.0;
    const Writes& w = it->second;
    if (w.count != 1 || !w.value || !w.top_level || w.at >= at)
      return std::nullopt;
    auto v = eval(*w.value, w.at);
    if (v && sym->type == ScalarType::Int) return std::trunc(*v);
    return v;
  }

  const Ast& ast_;
  std::map<std::string, Writes> writes_;
};

std::optional<std::int64_t> static_trip(const ForLoop& f, double start,
                                        double bound, bool int_index) {
  if (int_index) start = std::trunc(start);
  double k = static_cast<double>(f.step);
  double span = bound - start;
  double n;
  if (f.cmp == Compare::Less)
    n = span <= 0 ? 0 : std::ceil(span / k);
  else
    n = span < 0 ? 0 : std::floor(span / k) + 1;
  if (!std::isfinite(n) || n > 9.0e15) return std::nullopt;
  auto trips = static_cast<std::int64_t>(n);
  if (start != std::trunc(start) && trips <= 10'000'000) {
    // Fractional starts accumulate rounding; replay the header exactly.
    std::int64_t count = 0;
    for (double i = start;
         f.cmp == Compare::Less ? i < bound : i <= bound; i += k)
      ++count;
    trips = count;
  }
  return trips;
}

struct Builder {
  const Ast& ast;
  StaticValues statics;
  std::vector<LoopInfo> out;

  void visit(const Stmt& s, std::optional<NodeId> parent, std::size_t depth) {
    if (const auto* f = std::get_if<ForLoop>(&s.node)) {
      out.push_back(describe(s, *f, parent, depth));
      visit(*f->body, s.id, depth + 1);
    } else if (const auto* b = std::get_if<Block>(&s.node)) {
      for (const auto& c : b->stmts) visit(c, parent, depth);
    }
  }

  LoopInfo describe(const Stmt& s, const ForLoop& f,
                    std::optional<NodeId> parent, std::size_t depth) {
    LoopInfo info;
    info.loop_id = s.id;
    info.parent = parent;
    info.depth = depth;
    info.index_var = f.init_var;
    info.begin = s.loc;
    info.end = f.end;

    header_reads(f, info.uses);
    stmt_accesses(*f.body, info.defs, info.uses);

    std::vector<std::string> reasons;
    bool canonical = f.init_var == f.cond_var && f.init_var == f.step_var &&
                     f.step >= 1;
    if (!canonical) {
      reasons.push_back(f.step < 1
                            ? "non-canonical header: step must be positive"
                            : "non-canonical header: init, condition and "
                              "step use different variables");
    }

    std::set<std::string> header_vars;
    expr_reads(f.init, header_vars);
    expr_reads(f.bound, header_vars);
    std::optional<std::string> variant;
    for (const auto& v : header_vars)
      if (v == f.init_var || info.defs.count(v)) variant = v;
    auto start = statics.eval(f.init, s.id);
    auto bound = statics.eval(f.bound, s.id);
    bool index_written = info.defs.count(f.init_var) > 0;

    if (variant) {
      reasons.push_back("bound depends on '" + *variant +
                        "', which changes inside the loop");
    } else if (!start || !bound) {
      reasons.push_back("bounds are not statically evaluable");
    }

    std::string callee;
    if (stmt_has_unknown_call(*f.body, callee))
      reasons.push_back("body calls unknown function '" + callee + "'");
    if (index_written)
      reasons.push_back("index variable '" + f.init_var +
                        "' is written in the body");

    if (canonical && !variant && start && bound && !index_written) {
      const Symbol* idx = ast.find_symbol(f.init_var);
      auto trips = static_trip(f, *start, *bound,
                               idx && idx->type == ScalarType::Int);
      if (!trips) {
        reasons.push_back("trip count is not representable");
      } else if (*trips == 0) {
        reasons.push_back("loop body never executes");
      } else {
        info.trip_count = *trips;
      }
    }

    info.eligible = reasons.empty();
    if (!reasons.empty()) {
      std::string joined;
      for (const auto& r : reasons) {
        if (!joined.empty()) joined += "; ";
        joined += r;
      }
      info.reason = joined;
    }
    return info;
  }
};

}  // namespace

LoopTable::LoopTable(std::vector<LoopInfo> loops) : loops_(std::move(loops)) {
  for (const auto& l : loops_)
    if (l.eligible) eligible_.push_back(l.loop_id);
}

const LoopInfo* LoopTable::find(NodeId id) const {
  auto it = std::find_if(loops_.begin(), loops_.end(),
                         [id](const LoopInfo& l) { return l.loop_id == id; });
  return it == loops_.end() ? nullptr : &*it;
}

const LoopInfo& LoopTable::at(NodeId id) const {
  const LoopInfo* l = find(id);
  if (!l) throw std::out_of_range("no loop with id " + std::to_string(id));
  return *l;
}

bool LoopTable::is_ancestor(NodeId ancestor, NodeId loop) const {
  for (auto p = at(loop).parent; p; p = at(*p).parent)
    if (*p == ancestor) return true;
  return false;
}

std::vector<NodeId> LoopTable::ancestors(NodeId loop) const {
  std::vector<NodeId> out;
  for (auto p = at(loop).parent; p; p = at(*p).parent) out.push_back(*p);
  return out;
}

std::optional<std::int64_t> LoopTable::entry_count(NodeId loop) const {
  std::int64_t n = 1;
  for (NodeId a : ancestors(loop)) {
    const auto& t = at(a).trip_count;
    if (!t) return std::nullopt;
    n *= *t;
  }
  return n;
}

LoopTable extract_loops(const Ast& ast) {
  Builder b{ast, StaticValues(ast), {}};
  for (const auto& item : ast.items)
    if (const auto* s = std::get_if<Stmt>(&item)) b.visit(*s, std::nullopt, 0);
  return LoopTable(std::move(b.out));
}

}  // namespace offload::minic
