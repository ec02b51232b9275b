#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "germforge/tform.hpp"

namespace germforge {

struct SourcePos {
  int line = 1;
  int col = 1;
};

struct ParseError : std::runtime_error {
  SourcePos pos;
  ParseError(SourcePos p, const std::string& msg)
      : std::runtime_error("line " + std::to_string(p.line) + ", column " +
                           std::to_string(p.col) + ": " + msg),
        pos(p) {}
};

struct ElaborationError : std::runtime_error {
  SourcePos pos;
  ElaborationError(SourcePos p, const std::string& msg)
      : std::runtime_error("line " + std::to_string(p.line) + ", column " +
                           std::to_string(p.col) + ": " + msg),
        pos(p) {}
};

// ---------------------------------------------------------------------------
// Tokens

namespace dsl {

enum class TokKind { Ident, Int, Symbol, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  long long value = 0;
  SourcePos pos;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  SourcePos pos;
  std::size_t i = 0;
  auto advance = [&](char c) {
    if (c == '\n') {
      ++pos.line;
      pos.col = 1;
    } else {
      ++pos.col;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(c);
      ++i;
      continue;
    }
    if (c == '#') {  // line comment
      while (i < src.size() && src[i] != '\n') {
        advance(src[i]);
        ++i;
      }
      continue;
    }
    SourcePos start = pos;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string text;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        text.push_back(src[i]);
        advance(src[i]);
        ++i;
      }
      out.push_back(Token{TokKind::Ident, std::move(text), 0, start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string text;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
        text.push_back(src[i]);
        advance(src[i]);
        ++i;
      }
      if (text.size() > 18) throw ParseError(start, "integer literal too large");
      out.push_back(Token{TokKind::Int, text, std::stoll(text), start});
      continue;
    }
    static const std::string symbols = "+-*/^()=;,";
    if (symbols.find(c) != std::string::npos) {
      out.push_back(Token{TokKind::Symbol, std::string(1, c), 0, start});
      advance(c);
      ++i;
      continue;
    }
    throw ParseError(start, std::string("unexpected character '") + c + "'");
  }
  out.push_back(Token{TokKind::End, "", 0, pos});
  return out;
}

}  // namespace dsl

// ---------------------------------------------------------------------------
// Syntax tree

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind { Int, Name, Unary, Binary, Power, Call };
  Kind kind = Kind::Int;
  SourcePos pos;
  long long int_value = 0;
  std::string name;  // Name and Call
  char op = 0;       // Binary: + - * /  Unary: -
  int exponent = 0;  // Power
  std::vector<ExprPtr> children;
};

struct Definition {
  enum class Kind { Poly, Form, Family };
  Kind kind = Kind::Poly;
  std::string name;
  ExprPtr expr;
  SourcePos pos;
};

struct TaskDirective {
  std::string name;
  std::vector<ExprPtr> args;
  SourcePos pos;
};

struct ProblemFile {
  std::vector<std::string> variables;
  std::optional<int> degree;
  std::optional<int> torder;
  std::vector<Definition> definitions;
  std::optional<TaskDirective> task;
};

// ---------------------------------------------------------------------------
// Parser: recursive descent with precedence  unary- < ^  then * /  then + -.

namespace dsl {

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  ProblemFile parse() {
    ProblemFile file;
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind != TokKind::Ident)
        throw ParseError(t.pos, "expected a statement keyword");
      if (t.text == "vars") {
        if (!file.variables.empty())
          throw ParseError(t.pos, "variables are already declared");
        if (!file.definitions.empty() || file.task)
          throw ParseError(t.pos, "vars must come before definitions and tasks");
        parse_vars(file);
      } else if (t.text == "degree") {
        parse_order(file.degree, "D");
      } else if (t.text == "torder") {
        parse_order(file.torder, "K");
      } else if (t.text == "poly" || t.text == "form" || t.text == "family") {
        if (file.variables.empty())
          throw ParseError(t.pos, "declare vars before definitions");
        parse_definition(file);
      } else if (t.text == "task") {
        if (file.task) throw ParseError(t.pos, "only one task per file");
        parse_task(file);
      } else {
        throw ParseError(t.pos, "unknown statement '" + t.text + "'");
      }
    }
    return file;
  }

 private:
  bool at_end() const { return toks_[idx_].kind == dsl::TokKind::End; }
  const Token& peek() const { return toks_[idx_]; }
  Token next() { return toks_[idx_++]; }

  bool is_symbol(const Token& t, char c) const {
    return t.kind == TokKind::Symbol && t.text.size() == 1 && t.text[0] == c;
  }

  Token expect_symbol(char c) {
    Token t = next();
    if (!is_symbol(t, c))
      throw ParseError(t.pos, std::string("expected '") + c + "'");
    return t;
  }

  Token expect_ident() {
    Token t = next();
    if (t.kind != TokKind::Ident) throw ParseError(t.pos, "expected an identifier");
    return t;
  }

  void parse_vars(ProblemFile& file) {
    next();  // vars
    while (peek().kind == TokKind::Ident) {
      Token t = next();
      if (t.text == "t" || t.text == "d")
        throw ParseError(t.pos, "'" + t.text + "' is reserved");
      for (const auto& v : file.variables)
        if (v == t.text) throw ParseError(t.pos, "duplicate variable '" + t.text + "'");
      file.variables.push_back(t.text);
    }
    if (file.variables.empty())
      throw ParseError(peek().pos, "vars needs at least one variable name");
    for (const auto& v : file.variables)
      for (const auto& w : file.variables)
        if ("d" + v == w)
          throw ParseError(peek().pos,
                           "variable '" + w + "' collides with the differential of '" + v + "'");
    expect_symbol(';');
  }

  void parse_order(std::optional<int>& slot, const std::string& letter) {
    Token kw = next();  // degree | torder
    if (slot) throw ParseError(kw.pos, kw.text + " is already set");
    if (peek().kind == TokKind::Ident) {
      Token t = next();
      if (t.text != letter)
        throw ParseError(t.pos, "expected '" + letter + "' or an integer");
      expect_symbol('=');
    }
    Token v = next();
    if (v.kind != TokKind::Int) throw ParseError(v.pos, "expected an integer");
    if (v.value <= 0) throw ParseError(v.pos, kw.text + " must be positive");
    if (v.value > 64) throw ParseError(v.pos, kw.text + " is unreasonably large");
    slot = static_cast<int>(v.value);
    expect_symbol(';');
  }

  void parse_definition(ProblemFile& file) {
    Token kw = next();
    Definition def;
    def.kind = kw.text == "poly"   ? Definition::Kind::Poly
               : kw.text == "form" ? Definition::Kind::Form
                                   : Definition::Kind::Family;
    Token name = expect_ident();
    def.name = name.text;
    def.pos = name.pos;
    validate_name(file, name);
    expect_symbol('=');
    def.expr = parse_expr();
    expect_symbol(';');
    file.definitions.push_back(std::move(def));
  }

  void validate_name(const ProblemFile& file, const Token& name) {
    static const char* keywords[] = {"vars", "degree", "torder", "poly",
                                     "form", "family", "task"};
    for (const char* k : keywords)
      if (name.text == k) throw ParseError(name.pos, "'" + name.text + "' is a keyword");
    if (name.text == "t" || name.text == "d")
      throw ParseError(name.pos, "'" + name.text + "' is reserved");
    for (const auto& v : file.variables) {
      if (name.text == v)
        throw ParseError(name.pos, "'" + name.text + "' is already a variable");
      if (name.text == "d" + v)
        throw ParseError(name.pos, "'" + name.text + "' is a differential");
    }
    for (const auto& d : file.definitions)
      if (name.text == d.name)
        throw ParseError(name.pos, "'" + name.text + "' is already defined");
  }

  void parse_task(ProblemFile& file) {
    Token kw = next();
    TaskDirective task;
    task.pos = kw.pos;
    Token first = expect_ident();
    task.name = first.text;
    while (is_symbol(peek(), '-')) {
      next();
      Token part = expect_ident();
      task.name += "-" + part.text;
    }
    expect_symbol('(');
    if (!is_symbol(peek(), ')')) {
      task.args.push_back(parse_expr());
      while (is_symbol(peek(), ',')) {
        next();
        task.args.push_back(parse_expr());
      }
    }
    expect_symbol(')');
    expect_symbol(';');
    file.task = std::move(task);
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    while (is_symbol(peek(), '+') || is_symbol(peek(), '-')) {
      Token op = next();
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Binary;
      node->pos = op.pos;
      node->op = op.text[0];
      node->children.push_back(std::move(lhs));
      node->children.push_back(parse_term());
      lhs = std::move(node);
    }
    return lhs;
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    while (is_symbol(peek(), '*') || is_symbol(peek(), '/')) {
      Token op = next();
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Binary;
      node->pos = op.pos;
      node->op = op.text[0];
      node->children.push_back(std::move(lhs));
      node->children.push_back(parse_factor());
      lhs = std::move(node);
    }
    return lhs;
  }

  ExprPtr parse_factor() {
    if (is_symbol(peek(), '-') || is_symbol(peek(), '+')) {
      Token op = next();
      ExprPtr inner = parse_factor();
      if (op.text[0] == '+') return inner;
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Unary;
      node->pos = op.pos;
      node->op = '-';
      node->children.push_back(std::move(inner));
      return node;
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (!is_symbol(peek(), '^')) return base;
    Token caret = next();
    Token e = next();
    if (e.kind != TokKind::Int)
      throw ParseError(e.pos, "exponent must be a non-negative integer literal");
    if (e.value > 1000) throw ParseError(e.pos, "exponent too large");
    auto node = std::make_unique<Expr>();
    node->kind = Expr::Kind::Power;
    node->pos = caret.pos;
    node->exponent = static_cast<int>(e.value);
    node->children.push_back(std::move(base));
    return node;
  }

  ExprPtr parse_atom() {
    Token t = next();
    if (t.kind == TokKind::Int) {
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Int;
      node->pos = t.pos;
      node->int_value = t.value;
      return node;
    }
    if (t.kind == TokKind::Ident) {
      if (is_symbol(peek(), '(')) {
        next();
        auto node = std::make_unique<Expr>();
        node->kind = Expr::Kind::Call;
        node->pos = t.pos;
        node->name = t.text;
        if (!is_symbol(peek(), ')')) {
          node->children.push_back(parse_expr());
          while (is_symbol(peek(), ',')) {
            next();
            node->children.push_back(parse_expr());
          }
        }
        expect_symbol(')');
        return node;
      }
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Name;
      node->pos = t.pos;
      node->name = t.text;
      return node;
    }
    if (is_symbol(t, '(')) {
      ExprPtr inner = parse_expr();
      expect_symbol(')');
      return inner;
    }
    throw ParseError(t.pos, "expected an expression");
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
};

}  // namespace dsl

inline ProblemFile parse_problem(std::string_view text) {
  return dsl::Parser(text).parse();
}

// ---------------------------------------------------------------------------
// Elaboration: every expression value is a t-series of p-forms at the
// problem's truncation orders. No arithmetic happens before this stage, so
// d(...) always acts on the fully built operand.

struct ElaboratedProblem {
  std::vector<std::string> variables;
  int dimension = 0;
  int degree = 0;
  int torder = 0;
  std::vector<std::pair<std::string, TForm>> definitions;
  std::string task_name;
  std::vector<TForm> task_args;
  std::vector<std::string> task_arg_names;  // source identifier when the arg is one
  std::vector<long long> task_arg_ints;     // literal value when the arg is one, else -1
};

namespace dsl {

class Elaborator {
 public:
  Elaborator(const std::vector<std::string>& vars, int degree, int torder)
      : vars_(vars), n_(static_cast<int>(vars.size())), D_(degree), K_(torder) {}

  TForm eval(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::Int:
        return constant(Rational(static_cast<long>(e.int_value)));
      case Expr::Kind::Name:
        return lookup(e);
      case Expr::Kind::Unary:
        return eval(*e.children[0]).scaled(Rational(-1));
      case Expr::Kind::Power:
        return power(e);
      case Expr::Kind::Binary:
        return binary(e);
      case Expr::Kind::Call:
        return call(e);
    }
    throw ElaborationError(e.pos, "unreachable expression kind");
  }

  void define(const std::string& name, TForm value) {
    env_.emplace(name, std::move(value));
  }

 private:
  TForm constant(const Rational& c) const {
    TForm v(0, n_, D_, K_);
    v.set_coefficient(0, PForm::from_jet(Jet::constant(n_, D_, c)));
    return v;
  }

  TForm lookup(const Expr& e) const {
    auto it = env_.find(e.name);
    if (it != env_.end()) return it->second;
    for (int i = 0; i < n_; ++i) {
      if (e.name == vars_[static_cast<std::size_t>(i)]) {
        TForm v(0, n_, D_, K_);
        v.set_coefficient(0, PForm::from_jet(Jet::variable(n_, D_, i)));
        return v;
      }
      if (e.name == "d" + vars_[static_cast<std::size_t>(i)]) {
        TForm v(1, n_, D_, K_);
        v.set_coefficient(0, PForm::basis_one_form(n_, D_, i));
        return v;
      }
    }
    if (e.name == "t") {
      if (K_ < 1) throw ElaborationError(e.pos, "t requires torder >= 1");
      TForm v(0, n_, D_, K_);
      v.set_coefficient(1, PForm::from_jet(Jet::constant(n_, D_, Rational(1))));
      return v;
    }
    throw ElaborationError(e.pos, "unknown identifier '" + e.name + "'");
  }

  TForm power(const Expr& e) const {
    TForm base = eval(*e.children[0]);
    if (e.exponent == 1) return base;
    if (base.form_degree() != 0)
      throw ElaborationError(e.pos, "powers are only defined for scalar expressions");
    TPoly acc = TPoly::one(n_, D_, K_);
    TPoly b = base.as_tpoly();
    for (int i = 0; i < e.exponent; ++i) acc = acc * b;
    return TForm::from_tpoly(acc);
  }

  TForm binary(const Expr& e) const {
    TForm lhs = eval(*e.children[0]);
    TForm rhs = eval(*e.children[1]);
    switch (e.op) {
      case '+':
      case '-': {
        if (lhs.form_degree() != rhs.form_degree())
          throw ElaborationError(e.pos, "cannot add forms of different degrees");
        return e.op == '+' ? lhs + rhs : lhs - rhs;
      }
      case '*': {
        if (lhs.form_degree() == 0) return scale_by_tpoly(rhs, lhs.as_tpoly());
        if (rhs.form_degree() == 0) return scale_by_tpoly(lhs, rhs.as_tpoly());
        if (lhs.form_degree() + rhs.form_degree() > 3)
          throw ElaborationError(e.pos, "wedge product above degree 3");
        return wedge(lhs, rhs);
      }
      case '/': {
        if (rhs.form_degree() != 0)
          throw ElaborationError(e.pos, "division by a form");
        TPoly den = rhs.as_tpoly();
        if (!den.t0().is_unit())
          throw ElaborationError(e.pos, "division by a non-unit");
        return scale_by_tpoly(lhs, invert_unit(den));
      }
      default:
        throw ElaborationError(e.pos, "unknown operator");
    }
  }

  TForm call(const Expr& e) const {
    if (e.name != "d")
      throw ElaborationError(e.pos, "unknown function '" + e.name + "'");
    if (e.children.size() != 1)
      throw ElaborationError(e.pos, "d takes exactly one argument");
    TForm arg = eval(*e.children[0]);
    if (arg.form_degree() >= 3)
      throw ElaborationError(e.pos, "d of a 3-form");
    return exterior_d(arg);
  }

  std::vector<std::string> vars_;
  int n_;
  int D_;
  int K_;
  std::map<std::string, TForm> env_;
};

}  // namespace dsl

inline ElaboratedProblem elaborate(const ProblemFile& file,
                                   std::optional<int> degree_override = std::nullopt,
                                   std::optional<int> torder_override = std::nullopt) {
  ElaboratedProblem out;
  out.variables = file.variables;
  out.dimension = static_cast<int>(file.variables.size());
  out.degree = degree_override.value_or(file.degree.value_or(10));
  out.torder = torder_override.value_or(file.torder.value_or(4));
  if (out.dimension == 0)
    throw ElaborationError({}, "no variables declared");
  if (out.degree <= 0 || out.torder <= 0)
    throw ElaborationError({}, "truncation orders must be positive");

  dsl::Elaborator el(file.variables, out.degree, out.torder);
  for (const auto& def : file.definitions) {
    TForm value = el.eval(*def.expr);
    switch (def.kind) {
      case Definition::Kind::Poly:
        if (value.form_degree() != 0)
          throw ElaborationError(def.pos, "poly '" + def.name + "' is not a scalar");
        break;
      case Definition::Kind::Form: {
        if (value.form_degree() != 1)
          throw ElaborationError(def.pos, "form '" + def.name + "' is not a 1-form");
        for (int j = 1; j <= value.t_order(); ++j)
          if (!value.coefficient(j).is_zero())
            throw ElaborationError(def.pos, "form '" + def.name +
                                                "' must not involve t; use family");
        break;
      }
      case Definition::Kind::Family:
        if (value.form_degree() != 1)
          throw ElaborationError(def.pos, "family '" + def.name + "' is not a 1-form");
        break;
    }
    el.define(def.name, value);
    out.definitions.emplace_back(def.name, std::move(value));
  }

  if (file.task) {
    out.task_name = file.task->name;
    for (const auto& arg : file.task->args) {
      out.task_args.push_back(el.eval(*arg));
      out.task_arg_names.push_back(arg->kind == Expr::Kind::Name ? arg->name : "");
      out.task_arg_ints.push_back(arg->kind == Expr::Kind::Int ? arg->int_value : -1);
    }
  }
  return out;
}

}  // namespace germforge
