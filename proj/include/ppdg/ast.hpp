#pragma once

// MiniLang abstract syntax.
//
// Expressions and statements are plain value types: copying an Ast yields an
// independent tree, and operator== is structural (statement ids included).

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ppdg {

/// Pre-order statement number, 1-based and dense over a program.
struct StmtId {
  int value = 0;
  friend constexpr auto operator<=>(StmtId, StmtId) = default;
};

enum class UnaryOp { Neg, Not };

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

/// Operator families. Mutation operators never move an operator out of its
/// family, and the unparser relies on that to keep layout stable.
enum class OpFamily { Arithmetic, Relational, Logical };

constexpr OpFamily family(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: case BinaryOp::Sub: case BinaryOp::Mul:
    case BinaryOp::Div: case BinaryOp::Mod:
      return OpFamily::Arithmetic;
    case BinaryOp::Lt: case BinaryOp::Le: case BinaryOp::Gt:
    case BinaryOp::Ge: case BinaryOp::Eq: case BinaryOp::Ne:
      return OpFamily::Relational;
    case BinaryOp::And: case BinaryOp::Or:
      return OpFamily::Logical;
  }
  return OpFamily::Arithmetic;
}

// Binding strength, higher binds tighter.
constexpr int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq: case BinaryOp::Ne: return 3;
    case BinaryOp::Lt: case BinaryOp::Le: case BinaryOp::Gt: case BinaryOp::Ge: return 4;
    case BinaryOp::Add: case BinaryOp::Sub: return 5;
    case BinaryOp::Mul: case BinaryOp::Div: case BinaryOp::Mod: return 6;
  }
  return 0;
}

constexpr std::string_view spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

constexpr std::string_view spelling(UnaryOp op) {
  return op == UnaryOp::Neg ? "-" : "!";
}

struct Expr {
  enum class Kind { Literal, Variable, Unary, Binary };

  Kind kind = Kind::Literal;
  std::int64_t value = 0;      // Literal
  std::string name;            // Variable
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  std::vector<Expr> operands;  // 1 for Unary, 2 for Binary

  static Expr literal(std::int64_t v) {
    Expr e;
    e.kind = Kind::Literal;
    e.value = v;
    return e;
  }
  static Expr variable(std::string n) {
    Expr e;
    e.kind = Kind::Variable;
    e.name = std::move(n);
    return e;
  }
  static Expr unary(UnaryOp op, Expr operand) {
    Expr e;
    e.kind = Kind::Unary;
    e.unary_op = op;
    e.operands.push_back(std::move(operand));
    return e;
  }
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Kind::Binary;
    e.binary_op = op;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    return e;
  }

  friend bool operator==(const Expr&, const Expr&) = default;
};

struct Stmt {
  enum class Kind { Assign, If, While, Print };

  StmtId id;
  Kind kind = Kind::Assign;
  std::string target;           // Assign
  Expr expr;                    // assigned value, printed value, or condition
  std::vector<Stmt> body;       // If then-block, While body
  std::vector<Stmt> else_body;  // If else-block (may be empty)

  bool is_predicate() const { return kind == Kind::If || kind == Kind::While; }

  friend bool operator==(const Stmt&, const Stmt&) = default;
};

struct Ast {
  std::vector<std::string> inputs;  // declaration order
  std::vector<Stmt> statements;
  int statement_count = 0;

  friend bool operator==(const Ast&, const Ast&) = default;
};

constexpr std::string_view kind_name(Stmt::Kind k) {
  switch (k) {
    case Stmt::Kind::Assign: return "assign";
    case Stmt::Kind::If: return "if";
    case Stmt::Kind::While: return "while";
    case Stmt::Kind::Print: return "print";
  }
  return "?";
}

namespace detail {
template <class Fn>
void visit_pre_order(const std::vector<Stmt>& block, Fn& fn) {
  for (const Stmt& s : block) {
    fn(s);
    visit_pre_order(s.body, fn);
    visit_pre_order(s.else_body, fn);
  }
}
template <class Fn>
void visit_pre_order_mut(std::vector<Stmt>& block, Fn& fn) {
  for (Stmt& s : block) {
    fn(s);
    visit_pre_order_mut(s.body, fn);
    visit_pre_order_mut(s.else_body, fn);
  }
}
}  // namespace detail

/// Calls fn on every statement in pre-order (the StmtId order).
template <class Fn>
void for_each_stmt(const Ast& ast, Fn&& fn) {
  detail::visit_pre_order(ast.statements, fn);
}

template <class Fn>
void for_each_stmt(Ast& ast, Fn&& fn) {
  detail::visit_pre_order_mut(ast.statements, fn);
}

/// Statements indexed by id; element i holds StmtId i+1. Pointers are only
/// valid while the Ast is alive and unmodified.
inline std::vector<const Stmt*> flatten(const Ast& ast) {
  std::vector<const Stmt*> out;
  out.reserve(static_cast<std::size_t>(ast.statement_count));
  for_each_stmt(ast, [&](const Stmt& s) { out.push_back(&s); });
  return out;
}

template <class Fn>
void for_each_variable_read(const Expr& e, Fn&& fn) {
  switch (e.kind) {
    case Expr::Kind::Literal:
      return;
    case Expr::Kind::Variable:
      fn(e.name);
      return;
    case Expr::Kind::Unary:
    case Expr::Kind::Binary:
      for (const Expr& op : e.operands) for_each_variable_read(op, fn);
      return;
  }
}

/// Renumbers statements 1..N in pre-order and updates statement_count.
inline void renumber(Ast& ast) {
  int next = 0;
  for_each_stmt(ast, [&](Stmt& s) { s.id = StmtId{++next}; });
  ast.statement_count = next;
}

}  // namespace ppdg
