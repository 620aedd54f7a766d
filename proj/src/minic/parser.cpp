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
#include <array>
#include <cctype>
#include <charconv>
#include <unordered_map>

#include "offload/error.hpp"
#include "offload/minic.hpp"

namespace offload::minic {

namespace {

enum class TokenKind { Ident, Number, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  double number = 0.0;
  SourceLoc loc;
};

constexpr std::array<std::string_view, 3> kIntrinsics = {"sin", "cos", "sqrt"};
constexpr std::array<std::string_view, 3> kKeywords = {"int", "float", "for"};

bool is_intrinsic(std::string_view name) {
  return std::find(kIntrinsics.begin(), kIntrinsics.end(), name) !=
         kIntrinsics.end();
}

bool is_reserved(std::string_view name) {
  return is_intrinsic(name) ||
         std::find(kKeywords.begin(), kKeywords.end(), name) != kKeywords.end();
}

std::string describe(const Token& tok) {
  switch (tok.kind) {
    case TokenKind::End:
      return "end of input";
    case TokenKind::Ident:
      return "identifier '" + tok.text + "'";
    case TokenKind::Number:
      return "number '" + tok.text + "'";
    case TokenKind::Punct:
      return "'" + tok.text + "'";
  }
  return "token";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token tok;
      tok.loc = {line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back(tok);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_'))
          advance();
        tok.kind = TokenKind::Ident;
        tok.text = std::string(src_.substr(start, pos_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number(tok);
      } else {
        lex_punct(tok);
      }
      out.push_back(std::move(tok));
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  bool at_line_start() const {
    for (std::size_t i = pos_; i > 0; --i) {
      char p = src_[i - 1];
      if (p == '\n') return true;
      if (p != ' ' && p != '\t' && p != '\r') return false;
    }
    return true;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#' && at_line_start()) {
        // Directive lines (e.g. emitted pragmas) carry no MiniC meaning.
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        SourceLoc open{line_, col_};
        advance();
        advance();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= src_.size())
          throw SyntaxError(open.line, open.column, "unterminated comment");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  void lex_number(Token& tok) {
    std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        advance();
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save_pos = pos_, save_col = col_;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
        advance();
      if (pos_ < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits();
      } else {
        pos_ = save_pos;
        col_ = save_col;
      }
    }
    tok.kind = TokenKind::Number;
    tok.text = std::string(src_.substr(start, pos_ - start));
    auto [ptr, ec] = std::from_chars(tok.text.data(),
                                     tok.text.data() + tok.text.size(),
                                     tok.number);
    if (ec != std::errc() || ptr != tok.text.data() + tok.text.size())
      throw SyntaxError(tok.loc.line, tok.loc.column,
                        "malformed number '" + tok.text + "'");
  }

  void lex_punct(Token& tok) {
    static constexpr std::array<std::string_view, 3> kTwo = {"<=", "++", "+="};
    tok.kind = TokenKind::Punct;
    for (auto two : kTwo) {
      if (src_.substr(pos_, 2) == two) {
        tok.text = std::string(two);
        advance();
        advance();
        return;
      }
    }
    char c = src_[pos_];
    if (std::string_view("(){}[];,=+-*/<").find(c) == std::string_view::npos)
      throw SyntaxError(line_, col_,
                        std::string("unexpected character '") + c + "'");
    tok.text = std::string(1, c);
    advance();
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view source, std::vector<Token> tokens)
      : tokens_(std::move(tokens)) {
    ast_.source = std::string(source);
  }

  Ast run() {
    while (peek().kind != TokenKind::End) {
      if (peek_is_type()) {
        ast_.items.emplace_back(parse_decl());
      } else {
        ast_.items.emplace_back(parse_stmt());
      }
    }
    ast_.node_count = next_id_;
    return std::move(ast_);
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  Token take() {
    Token t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    last_ = t.loc;
    return t;
  }
  bool at_punct(std::string_view p) const {
    return peek().kind == TokenKind::Punct && peek().text == p;
  }
  bool peek_is_type() const {
    return peek().kind == TokenKind::Ident &&
           (peek().text == "int" || peek().text == "float");
  }

  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(peek().loc.line, peek().loc.column,
                      "expected " + expected + ", found " + describe(peek()));
  }

  Token expect_punct(std::string_view p) {
    if (!at_punct(p)) fail("'" + std::string(p) + "'");
    return take();
  }

  Token expect_ident(const char* what) {
    if (peek().kind != TokenKind::Ident || is_reserved(peek().text)) fail(what);
    return take();
  }

  const Symbol& lookup(const Token& name) const {
    auto it = slots_.find(name.text);
    if (it == slots_.end())
      throw UndeclaredIdentifier(name.loc.line, name.loc.column, name.text);
    return ast_.symbols[it->second];
  }
  Slot slot_of(const Token& name) const { return slots_.at(name.text); }

  Decl parse_decl() {
    Decl d;
    d.loc = peek().loc;
    d.id = next_id_++;
    d.type = take().text == "int" ? ScalarType::Int : ScalarType::Float;
    Token name = expect_ident("variable name");
    if (slots_.count(name.text))
      throw SyntaxError(name.loc.line, name.loc.column,
                        "redeclaration of '" + name.text + "'");
    d.name = name.text;
    if (at_punct("[")) {
      take();
      if (peek().kind != TokenKind::Number) fail("array extent");
      Token ext = take();
      double v = ext.number;
      if (ext.text.find_first_not_of("0123456789") != std::string::npos ||
          v < 1 || v > 1e9)
        throw SyntaxError(ext.loc.line, ext.loc.column,
                          "array extent must be a positive integer literal");
      d.extent = static_cast<std::size_t>(v);
      expect_punct("]");
    }
    if (at_punct("=")) {
      take();
      d.init = parse_expr();
    }
    expect_punct(";");
    slots_.emplace(d.name, static_cast<Slot>(ast_.symbols.size()));
    ast_.symbols.push_back(Symbol{d.name, d.type, d.extent, d.id});
    return d;
  }

  Stmt parse_stmt() {
    Stmt s;
    s.loc = peek().loc;
    if (at_punct("{")) {
      s.id = next_id_++;
      take();
      Block b;
      while (!at_punct("}")) {
        if (peek().kind == TokenKind::End) fail("'}'");
        if (peek_is_type())
          throw SyntaxError(peek().loc.line, peek().loc.column,
                            "declarations are only allowed at top level");
        b.stmts.push_back(parse_stmt());
      }
      b.end = take().loc;
      s.node = std::move(b);
      return s;
    }
    if (peek().kind == TokenKind::Ident && peek().text == "for") {
      s.id = next_id_++;
      s.node = parse_for();
      return s;
    }
    if (peek().kind != TokenKind::Ident) fail("statement");
    if (peek_is_type())
      throw SyntaxError(peek().loc.line, peek().loc.column,
                        "declarations are only allowed at top level");
    if (peek(1).kind == TokenKind::Punct && peek(1).text == "(") {
      s.id = next_id_++;
      Token name = take();
      Expr call = parse_call(name);
      expect_punct(";");
      s.node = std::get<Call>(std::move(call.node));
      return s;
    }
    s.id = next_id_++;
    s.node = parse_assign();
    expect_punct(";");
    return s;
  }

  Assign parse_assign() {
    Token name = expect_ident("assignment target");
    const Symbol& sym = lookup(name);
    Assign a{name.text, slot_of(name), std::nullopt, Expr{}};
    if (at_punct("[")) {
      if (!sym.is_array())
        throw SyntaxError(name.loc.line, name.loc.column,
                          "'" + name.text + "' is not an array");
      take();
      a.index = parse_expr();
      expect_punct("]");
    } else if (sym.is_array()) {
      throw SyntaxError(name.loc.line, name.loc.column,
                        "array '" + name.text + "' needs a subscript");
    }
    expect_punct("=");
    a.value = parse_expr();
    return a;
  }

  Token scalar_ident(const char* what) {
    Token t = expect_ident(what);
    if (lookup(t).is_array())
      throw SyntaxError(t.loc.line, t.loc.column,
                        "loop variable '" + t.text + "' must be a scalar");
    return t;
  }

  ForLoop parse_for() {
    take();  // for
    expect_punct("(");
    Token init_var = scalar_ident("loop variable");
    expect_punct("=");
    Expr init = parse_expr();
    expect_punct(";");
    Token cond_var = scalar_ident("loop variable");
    Compare cmp;
    if (at_punct("<")) {
      cmp = Compare::Less;
    } else if (at_punct("<=")) {
      cmp = Compare::LessEqual;
    } else {
      fail("'<' or '<='");
    }
    take();
    Expr bound = parse_expr();
    expect_punct(";");
    Token step_var = scalar_ident("loop variable");
    std::int64_t step = 1;
    bool increment = true;
    if (at_punct("++")) {
      take();
    } else if (at_punct("+=")) {
      take();
      if (peek().kind != TokenKind::Number ||
          peek().text.find_first_not_of("0123456789") != std::string::npos)
        fail("integer step");
      Token k = take();
      if (k.number > 1e15)
        throw SyntaxError(k.loc.line, k.loc.column, "step too large");
      step = static_cast<std::int64_t>(k.number);
      increment = false;
    } else {
      fail("'++' or '+='");
    }
    expect_punct(")");
    Stmt body = parse_stmt();
    return ForLoop{init_var.text,  slot_of(init_var), std::move(init),
                   cond_var.text,  slot_of(cond_var), cmp,
                   std::move(bound), step_var.text,   slot_of(step_var),
                   step,           increment,         Box<Stmt>(std::move(body)),
                   last_};
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (at_punct("+") || at_punct("-")) {
      auto op = take().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
      Expr rhs = parse_term();
      SourceLoc start = lhs.loc;
      lhs = Expr{Binary{op, std::move(lhs), std::move(rhs)}, start};
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    while (at_punct("*") || at_punct("/")) {
      auto op = take().text == "*" ? BinaryOp::Mul : BinaryOp::Div;
      Expr rhs = parse_unary();
      SourceLoc start = lhs.loc;
      lhs = Expr{Binary{op, std::move(lhs), std::move(rhs)}, start};
    }
    return lhs;
  }

  // Unary minus is sugar for `0 - e`.
  Expr parse_unary() {
    if (at_punct("-")) {
      SourceLoc loc = take().loc;
      Expr operand = parse_unary();
      return Expr{Binary{BinaryOp::Sub, Expr{Number{0.0}, loc},
                         std::move(operand)},
                  loc};
    }
    return parse_primary(false);
  }

  Expr parse_primary(bool allow_bare_array) {
    const Token& t = peek();
    if (t.kind == TokenKind::Number) {
      Token n = take();
      return Expr{Number{n.number}, n.loc};
    }
    if (at_punct("(")) {
      take();
      Expr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (t.kind != TokenKind::Ident || (is_reserved(t.text) && !is_intrinsic(t.text)))
      fail("expression");
    Token name = take();
    if (at_punct("(")) return parse_call(name);
    if (is_intrinsic(name.text)) fail("'('");
    const Symbol& sym = lookup(name);
    if (at_punct("[")) {
      if (!sym.is_array())
        throw SyntaxError(name.loc.line, name.loc.column,
                          "'" + name.text + "' is not an array");
      take();
      Expr index = parse_expr();
      expect_punct("]");
      return Expr{ArrayRead{name.text, slot_of(name), std::move(index)},
                  name.loc};
    }
    if (sym.is_array() && !allow_bare_array)
      throw SyntaxError(name.loc.line, name.loc.column,
                        "array '" + name.text + "' needs a subscript");
    return Expr{VarRead{name.text, slot_of(name)}, name.loc};
  }

  Expr parse_call(const Token& name) {
    if (slots_.count(name.text))
      throw SyntaxError(name.loc.line, name.loc.column,
                        "'" + name.text + "' is a variable, not a function");
    Call call{name.text, {}, is_intrinsic(name.text)};
    expect_punct("(");
    if (!at_punct(")")) {
      for (;;) {
        // Unknown functions may take whole arrays by name.
        if (!call.intrinsic && peek().kind == TokenKind::Ident &&
            peek(1).kind == TokenKind::Punct &&
            (peek(1).text == "," || peek(1).text == ")") &&
            !is_reserved(peek().text)) {
          call.args.push_back(parse_primary(true));
        } else {
          call.args.push_back(parse_expr());
        }
        if (!at_punct(",")) break;
        take();
      }
    }
    expect_punct(")");
    if (call.intrinsic && call.args.size() != 1)
      throw SyntaxError(name.loc.line, name.loc.column,
                        "'" + name.text + "' takes exactly one argument");
    return Expr{std::move(call), name.loc};
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  SourceLoc last_;
  Ast ast_;
  std::unordered_map<std::string, Slot> slots_;
  NodeId next_id_ = 0;
};

}  // namespace

const Symbol* Ast::find_symbol(std::string_view name) const {
  for (const auto& s : symbols)
    if (s.name == name) return &s;
  return nullptr;
}

std::size_t Ast::declaration_count() const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [](const Item& it) {
        return std::holds_alternative<Decl>(it);
      }));
}

Ast parse_program(std::string_view source) {
  Lexer lexer(source);
  return Parser(source, lexer.run()).run();
}

namespace {

void collect(const Stmt& s, std::vector<const Stmt*>& out) {
  if (const auto* loop = std::get_if<ForLoop>(&s.node)) {
    out.push_back(&s);
    collect(*loop->body, out);
  } else if (const auto* block = std::get_if<Block>(&s.node)) {
    for (const auto& child : block->stmts) collect(child, out);
  }
}

}  // namespace

std::vector<const Stmt*> collect_loops(const Ast& ast) {
  std::vector<const Stmt*> out;
  for (const auto& item : ast.items)
    if (const auto* s = std::get_if<Stmt>(&item)) collect(*s, out);
  return out;
}

}  // namespace offload::minic
