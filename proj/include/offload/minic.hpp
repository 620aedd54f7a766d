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

// MiniC: the closed C subset the planner analyzes. One flat scope of int/float
// scalars and fixed-size arrays, assignments, canonical for-loops, blocks,
// intrinsic calls (sin, cos, sqrt) and opaque calls to unknown functions.
// Every value is a binary64 double.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace offload::minic {

using NodeId = std::uint32_t;
using Slot = std::uint32_t;

struct SourceLoc {
  std::size_t line = 1;
  std::size_t column = 1;
};

// Owning, deep-copying pointer so recursive AST nodes keep value semantics.
template <class T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  const T& operator*() const { return *ptr_; }
  T& operator*() { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  T* operator->() { return ptr_.get(); }

 private:
  std::unique_ptr<T> ptr_;
};

enum class ScalarType { Int, Float };
enum class BinaryOp : char { Add = '+', Sub = '-', Mul = '*', Div = '/' };
enum class Compare { Less, LessEqual };

struct Expr;

struct Number {
  double value = 0.0;
};

// A bare identifier. Names an array only as an argument of an unknown call.
struct VarRead {
  std::string name;
  Slot slot = 0;
};

struct ArrayRead {
  std::string name;
  Slot slot = 0;
  Box<Expr> index;
};

struct Binary {
  BinaryOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
};

struct Call {
  std::string callee;
  std::vector<Expr> args;
  bool intrinsic = false;
};

struct Expr {
  std::variant<Number, VarRead, ArrayRead, Binary, Call> node;
  SourceLoc loc;
};

struct Stmt;

struct Assign {
  std::string target;
  Slot slot = 0;
  std::optional<Expr> index;
  Expr value;
};

// for (init_var = init; cond_var <cmp> bound; step_var ++ | step_var += step)
struct ForLoop {
  std::string init_var;
  Slot init_slot = 0;
  Expr init;
  std::string cond_var;
  Slot cond_slot = 0;
  Compare cmp = Compare::Less;
  Expr bound;
  std::string step_var;
  Slot step_slot = 0;
  std::int64_t step = 1;
  bool increment_syntax = true;  // `i++` rather than `i += 1`
  Box<Stmt> body;
  SourceLoc end;  // last token of the body
};

struct Block {
  std::vector<Stmt> stmts;
  SourceLoc end;
};

struct Stmt {
  NodeId id = 0;
  SourceLoc loc;
  std::variant<Assign, ForLoop, Block, Call> node;
};

struct Decl {
  NodeId id = 0;
  SourceLoc loc;
  ScalarType type = ScalarType::Float;
  std::string name;
  std::optional<std::size_t> extent;  // present for arrays
  std::optional<Expr> init;
};

using Item = std::variant<Decl, Stmt>;

struct Symbol {
  std::string name;
  ScalarType type = ScalarType::Float;
  std::optional<std::size_t> extent;
  NodeId decl = 0;

  bool is_array() const { return extent.has_value(); }
  std::size_t element_count() const { return extent.value_or(1); }
  static constexpr std::size_t element_bytes() { return 8; }
  std::size_t bytes() const { return element_bytes() * element_count(); }
};

struct Ast {
  std::string source;
  std::vector<Item> items;
  std::vector<Symbol> symbols;  // indexed by Slot, declaration order
  std::size_t node_count = 0;

  const Symbol* find_symbol(std::string_view name) const;
  std::size_t declaration_count() const;
};

// Parses MiniC text. Node ids are assigned to declarations and statements in
// source (pre-)order. Throws SyntaxError or UndeclaredIdentifier.
Ast parse_program(std::string_view source);

// Canonical MiniC rendering; parse_program(print_program(ast)) is
// structurally identical to `ast`.
std::string print_program(const Ast& ast);

// S-expression rendering used by golden tests and structural comparison.
std::string dump_ast(const Ast& ast, bool with_ids = true);

// All for-loops in source order.
std::vector<const Stmt*> collect_loops(const Ast& ast);

// ---------------------------------------------------------------------------
// Loop table
// ---------------------------------------------------------------------------

struct LoopInfo {
  NodeId loop_id = 0;
  std::optional<NodeId> parent;
  std::size_t depth = 0;
  std::optional<std::int64_t> trip_count;
  bool eligible = false;
  std::optional<std::string> reason;
  std::set<std::string> defs;  // written in the body subtree
  std::set<std::string> uses;  // read in the header or body subtree
  std::string index_var;
  SourceLoc begin;
  SourceLoc end;
};

class LoopTable {
 public:
  LoopTable() = default;
  explicit LoopTable(std::vector<LoopInfo> loops);

  std::span<const LoopInfo> loops() const { return loops_; }
  std::size_t size() const { return loops_.size(); }
  const LoopInfo& at(NodeId id) const;
  const LoopInfo* find(NodeId id) const;

  // Eligible loops in table order; their count is the gene length.
  const std::vector<NodeId>& eligible_ids() const { return eligible_; }
  std::size_t gene_length() const { return eligible_.size(); }

  // Strict ancestor test over parent links.
  bool is_ancestor(NodeId ancestor, NodeId loop) const;
  // Enclosing loops, innermost first.
  std::vector<NodeId> ancestors(NodeId loop) const;
  // Number of times the loop statement itself is entered: the product of
  // the trip counts of all enclosing loops. nullopt if any is non-static.
  std::optional<std::int64_t> entry_count(NodeId loop) const;

 private:
  std::vector<LoopInfo> loops_;
  std::vector<NodeId> eligible_;
};

// Builds one LoopInfo per for-loop with nesting, static trip counts,
// eligibility and def/use sets. Ineligible loops are recorded with a reason.
LoopTable extract_loops(const Ast& ast);

// ---------------------------------------------------------------------------
// Interpreter
// ---------------------------------------------------------------------------

struct Variable {
  std::string name;
  bool is_array = false;
  std::vector<double> values;

  bool operator==(const Variable&) const = default;
};

// Final values of every declared variable, in declaration order.
struct ProgramOutput {
  std::vector<Variable> variables;

  bool operator==(const ProgramOutput&) const = default;
  const Variable* find(std::string_view name) const;
};

// Compares bit patterns, so NaN payloads and signed zeros count.
bool bitwise_equal(const ProgramOutput& a, const ProgramOutput& b);

using Memory = std::vector<std::vector<double>>;

// Storage for one or more memory spaces. Space 0 is the host and starts
// zeroed; any further space starts filled with quiet NaN so that reads of
// never-transferred data show up in the results.
class Machine {
 public:
  Machine(const Ast& ast, std::size_t spaces);

  Memory& space(std::size_t index) { return spaces_.at(index); }
  const Memory& space(std::size_t index) const { return spaces_.at(index); }
  std::size_t space_count() const { return spaces_.size(); }

  Memory& active() { return spaces_[active_]; }
  std::size_t active_index() const { return active_; }
  void activate(std::size_t index);

 private:
  std::vector<Memory> spaces_;
  std::size_t active_ = 0;
};

class ExecutionHooks {
 public:
  virtual ~ExecutionHooks() = default;
  virtual void before_loop(const Stmt& /*loop*/, Machine& /*machine*/) {}
  virtual void after_loop(const Stmt& /*loop*/, Machine& /*machine*/) {}
};

struct InterpretOptions {
  std::uint64_t iteration_cap = 100'000'000;
  std::size_t memory_spaces = 1;
  ExecutionHooks* hooks = nullptr;
};

// Sequential evaluation in double precision. Stores to `int` variables
// truncate toward zero. Throws EvalError on division by zero, out-of-bounds
// indexing, or when the total iteration count exceeds the cap. The output is
// read from the host space.
ProgramOutput interpret(const Ast& ast, const InterpretOptions& options = {});

}  // namespace offload::minic
