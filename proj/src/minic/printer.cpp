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
#include <sstream>

#include "offload/minic.hpp"

namespace offload::minic {

namespace {

std::string number_text(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

int precedence(BinaryOp op) {
  return (op == BinaryOp::Add || op == BinaryOp::Sub) ? 1 : 2;
}

const char* type_name(ScalarType t) {
  return t == ScalarType::Int ? "int" : "float";
}

// --- MiniC source -----------------------------------------------------------

void print_expr(std::ostream& os, const Expr& e);

void print_operand(std::ostream& os, const Expr& e, int parent_prec,
                   bool right) {
  const auto* bin = std::get_if<Binary>(&e.node);
  bool parens = bin && (precedence(bin->op) < parent_prec ||
                        (right && precedence(bin->op) == parent_prec));
  if (parens) os << '(';
  print_expr(os, e);
  if (parens) os << ')';
}

void print_expr(std::ostream& os, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Number>) {
          os << number_text(n.value);
        } else if constexpr (std::is_same_v<T, VarRead>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, ArrayRead>) {
          os << n.name << '[';
          print_expr(os, *n.index);
          os << ']';
        } else if constexpr (std::is_same_v<T, Binary>) {
          int p = precedence(n.op);
          print_operand(os, *n.lhs, p, false);
          os << ' ' << static_cast<char>(n.op) << ' ';
          print_operand(os, *n.rhs, p, true);
        } else {
          os << n.callee << '(';
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) os << ", ";
            print_expr(os, n.args[i]);
          }
          os << ')';
        }
      },
      e.node);
}

void print_stmt(std::ostream& os, const Stmt& s, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Assign>) {
          os << pad << n.target;
          if (n.index) {
            os << '[';
            print_expr(os, *n.index);
            os << ']';
          }
          os << " = ";
          print_expr(os, n.value);
          os << ";\n";
        } else if constexpr (std::is_same_v<T, ForLoop>) {
          os << pad << "for (" << n.init_var << " = ";
          print_expr(os, n.init);
          os << "; " << n.cond_var
             << (n.cmp == Compare::Less ? " < " : " <= ");
          print_expr(os, n.bound);
          os << "; " << n.step_var;
          if (n.increment_syntax)
            os << "++";
          else
            os << " += " << n.step;
          os << ")";
          if (std::holds_alternative<Block>(n.body->node)) {
            os << ' ';
            const auto& b = std::get<Block>(n.body->node);
            os << "{\n";
            for (const auto& c : b.stmts) print_stmt(os, c, indent + 1);
            os << pad << "}\n";
          } else {
            os << '\n';
            print_stmt(os, *n.body, indent + 1);
          }
        } else if constexpr (std::is_same_v<T, Block>) {
          os << pad << "{\n";
          for (const auto& c : n.stmts) print_stmt(os, c, indent + 1);
          os << pad << "}\n";
        } else {
          os << pad;
          print_expr(os, Expr{n, {}});
          os << ";\n";
        }
      },
      s.node);
}

// --- S-expression dump ------------------------------------------------------

void dump_expr(std::ostream& os, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Number>) {
          os << number_text(n.value);
        } else if constexpr (std::is_same_v<T, VarRead>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, ArrayRead>) {
          os << "(at " << n.name << ' ';
          dump_expr(os, *n.index);
          os << ')';
        } else if constexpr (std::is_same_v<T, Binary>) {
          os << '(' << static_cast<char>(n.op) << ' ';
          dump_expr(os, *n.lhs);
          os << ' ';
          dump_expr(os, *n.rhs);
          os << ')';
        } else {
          os << (n.intrinsic ? "(call " : "(opaque ") << n.callee;
          for (const auto& a : n.args) {
            os << ' ';
            dump_expr(os, a);
          }
          os << ')';
        }
      },
      e.node);
}

void dump_stmt(std::ostream& os, const Stmt& s, int indent, bool ids) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  std::string id = ids ? " #" + std::to_string(s.id) : "";
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Assign>) {
          os << pad << "(assign" << id << ' ';
          if (n.index) {
            os << "(at " << n.target << ' ';
            dump_expr(os, *n.index);
            os << ')';
          } else {
            os << n.target;
          }
          os << ' ';
          dump_expr(os, n.value);
          os << ")";
        } else if constexpr (std::is_same_v<T, ForLoop>) {
          os << pad << "(for" << id << " (= " << n.init_var << ' ';
          dump_expr(os, n.init);
          os << ") (" << (n.cmp == Compare::Less ? "<" : "<=") << ' '
             << n.cond_var << ' ';
          dump_expr(os, n.bound);
          os << ") ";
          if (n.increment_syntax)
            os << "(++ " << n.step_var << ")";
          else
            os << "(+= " << n.step_var << ' ' << n.step << ")";
          os << '\n';
          dump_stmt(os, *n.body, indent + 1, ids);
          os << ")";
        } else if constexpr (std::is_same_v<T, Block>) {
          os << pad << "(block" << id;
          for (const auto& c : n.stmts) {
            os << '\n';
            dump_stmt(os, c, indent + 1, ids);
          }
          os << ")";
        } else {
          os << pad << "(stmt" << id << ' ';
          dump_expr(os, Expr{n, {}});
          os << ")";
        }
      },
      s.node);
}

}  // namespace

std::string print_program(const Ast& ast) {
  std::ostringstream os;
  for (const auto& item : ast.items) {
    if (const auto* d = std::get_if<Decl>(&item)) {
      os << type_name(d->type) << ' ' << d->name;
      if (d->extent) os << '[' << *d->extent << ']';
      if (d->init) {
        os << " = ";
        print_expr(os, *d->init);
      }
      os << ";\n";
    } else {
      print_stmt(os, std::get<Stmt>(item), 0);
    }
  }
  return os.str();
}

std::string dump_ast(const Ast& ast, bool with_ids) {
  std::ostringstream os;
  for (const auto& item : ast.items) {
    if (const auto* d = std::get_if<Decl>(&item)) {
      os << "(decl";
      if (with_ids) os << " #" << d->id;
      os << ' ' << type_name(d->type) << ' ' << d->name;
      if (d->extent) os << '[' << *d->extent << ']';
      if (d->init) {
        os << ' ';
        dump_expr(os, *d->init);
      }
      os << ")\n";
    } else {
      dump_stmt(os, std::get<Stmt>(item), 0, with_ids);
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace offload::minic
