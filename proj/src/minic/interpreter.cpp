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
#include "offload/minic.hpp"

namespace offload::minic {

Machine::Machine(const Ast& ast, std::size_t spaces) {
  if (spaces == 0) spaces = 1;
  spaces_.resize(spaces);
  for (std::size_t s = 0; s < spaces; ++s) {
    double fill = s == 0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    for (const auto& sym : ast.symbols)
      spaces_[s].emplace_back(sym.element_count(), fill);
  }
}

void Machine::activate(std::size_t index) {
  if (index >= spaces_.size())
    throw std::out_of_range("memory space " + std::to_string(index));
  active_ = index;
}

const Variable* ProgramOutput::find(std::string_view name) const {
  for (const auto& v : variables)
    if (v.name == name) return &v;
  return nullptr;
}

bool bitwise_equal(const ProgramOutput& a, const ProgramOutput& b) {
  if (a.variables.size() != b.variables.size()) return false;
  for (std::size_t i = 0; i < a.variables.size(); ++i) {
    const auto& x = a.variables[i];
    const auto& y = b.variables[i];
    if (x.name != y.name || x.is_array != y.is_array ||
        x.values.size() != y.values.size())
      return false;
    for (std::size_t k = 0; k < x.values.size(); ++k)
      if (std::bit_cast<std::uint64_t>(x.values[k]) !=
          std::bit_cast<std::uint64_t>(y.values[k]))
        return false;
  }
  return true;
}

namespace {

class Interpreter {
 public:
  Interpreter(const Ast& ast, const InterpretOptions& opts)
      : ast_(ast), opts_(opts), machine_(ast, opts.memory_spaces) {}

  ProgramOutput run() {
    for (const auto& item : ast_.items) {
      if (const auto* d = std::get_if<Decl>(&item)) {
        if (d->init) init_decl(*d);
      } else {
        exec(std::get<Stmt>(item));
      }
    }
    ProgramOutput out;
    const Memory& host = machine_.space(0);
    for (std::size_t s = 0; s < ast_.symbols.size(); ++s)
      out.variables.push_back(
          {ast_.symbols[s].name, ast_.symbols[s].is_array(), host[s]});
    return out;
  }

 private:
  [[noreturn]] static void fail(const SourceLoc& loc, const std::string& msg) {
    throw EvalError(std::to_string(loc.line) + ":" +
                    std::to_string(loc.column) + ": " + msg);
  }

  double coerce(Slot slot, double v) const {
    return ast_.symbols[slot].type == ScalarType::Int ? std::trunc(v) : v;
  }

  void init_decl(const Decl& d) {
    Slot slot = static_cast<Slot>(&*ast_.find_symbol(d.name) - &ast_.symbols[0]);
    double v = coerce(slot, eval(*d.init));
    for (auto& cell : machine_.active()[slot]) cell = v;
  }

  std::size_t element(Slot slot, const Expr& index_expr) {
    double raw = eval(index_expr);
    double idx = std::trunc(raw);
    std::size_t n = ast_.symbols[slot].element_count();
    if (!(idx >= 0) || idx >= static_cast<double>(n))
      fail(index_expr.loc, "index " + std::to_string(raw) +
                               " out of bounds for '" +
                               ast_.symbols[slot].name + "' of extent " +
                               std::to_string(n));
    return static_cast<std::size_t>(idx);
  }

  double eval(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> double {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Number>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, VarRead>) {
            if (ast_.symbols[n.slot].is_array())
              fail(e.loc, "array '" + n.name + "' used as a value");
            return machine_.active()[n.slot][0];
          } else if constexpr (std::is_same_v<T, ArrayRead>) {
            std::size_t k = element(n.slot, *n.index);
            return machine_.active()[n.slot][k];
          } else if constexpr (std::is_same_v<T, Binary>) {
            double l = eval(*n.lhs);
            double r = eval(*n.rhs);
            switch (n.op) {
              case BinaryOp::Add:
                return l + r;
              case BinaryOp::Sub:
                return l - r;
              case BinaryOp::Mul:
                return l * r;
              case BinaryOp::Div:
                if (r == 0.0) fail(e.loc, "division by zero");
                return l / r;
            }
            return 0.0;
          } else {
            return call(n);
          }
        },
        e.node);
  }

  // Unknown functions are opaque: arguments are evaluated, nothing is
  // written, and the result is 0.
  double call(const Call& c) {
    if (c.intrinsic) {
      double a = eval(c.args[0]);
      if (c.callee == "sin") return std::sin(a);
      if (c.callee == "cos") return std::cos(a);
      return std::sqrt(a);
    }
    for (const auto& a : c.args) {
      const auto* v = std::get_if<VarRead>(&a.node);
      if (v && ast_.symbols[v->slot].is_array()) continue;
      eval(a);
    }
    return 0.0;
  }

  void store(Slot slot, std::size_t k, double v) {
    machine_.active()[slot][k] = coerce(slot, v);
  }

  void exec(const Stmt& s) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign>) {
            std::size_t k = n.index ? element(n.slot, *n.index) : 0;
            store(n.slot, k, eval(n.value));
          } else if constexpr (std::is_same_v<T, ForLoop>) {
            if (opts_.hooks) opts_.hooks->before_loop(s, machine_);
            run_loop(s, n);
            if (opts_.hooks) opts_.hooks->after_loop(s, machine_);
          } else if constexpr (std::is_same_v<T, Block>) {
            for (const auto& c : n.stmts) exec(c);
          } else {
            call(n);
          }
        },
        s.node);
  }

  void run_loop(const Stmt& s, const ForLoop& f) {
    store(f.init_slot, 0, eval(f.init));
    for (;;) {
      double i = machine_.active()[f.cond_slot][0];
      double bound = eval(f.bound);
      bool go = f.cmp == Compare::Less ? i < bound : i <= bound;
      if (!go) break;
      if (++iterations_ > opts_.iteration_cap)
        fail(s.loc, "iteration cap of " + std::to_string(opts_.iteration_cap) +
                        " exceeded");
      exec(*f.body);
      store(f.step_slot, 0,
            machine_.active()[f.step_slot][0] + static_cast<double>(f.step));
    }
  }

  const Ast& ast_;
  const InterpretOptions& opts_;
  Machine machine_;
  std::uint64_t iterations_ = 0;
};

}  // namespace

ProgramOutput interpret(const Ast& ast, const InterpretOptions& options) {
  return Interpreter(ast, options).run();
}

}  // namespace offload::minic
