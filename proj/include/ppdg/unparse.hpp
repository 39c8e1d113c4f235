#pragma once

// Canonical MiniLang printer. parse(unparse(ast)) == ast for every valid Ast.

#include <string>

#include "ppdg/ast.hpp"
#include "ppdg/parser.hpp"

namespace ppdg {

namespace detail {

// Nested binaries of the same operator family are always parenthesised, so
// replacing an operator within its family never adds or removes parentheses.
inline bool needs_parens(const Expr& child, BinaryOp parent, bool right) {
  if (child.kind != Expr::Kind::Binary) return false;
  if (family(child.binary_op) == family(parent)) return true;
  const int cp = precedence(child.binary_op);
  const int pp = precedence(parent);
  return cp < pp || (right && cp == pp);
}

inline std::string unparse_expr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Literal:
      return std::to_string(e.value);
    case Expr::Kind::Variable:
      return e.name;
    case Expr::Kind::Unary: {
      const Expr& operand = e.operands[0];
      std::string inner = unparse_expr(operand);
      if (operand.kind == Expr::Kind::Binary) inner = "(" + inner + ")";
      // "- 3" keeps the lexer from folding the sign into the literal.
      const bool spaced = e.unary_op == UnaryOp::Neg && !inner.empty() &&
                          inner.front() >= '0' && inner.front() <= '9';
      return std::string(spelling(e.unary_op)) + (spaced ? " " : "") + inner;
    }
    case Expr::Kind::Binary: {
      std::string lhs = unparse_expr(e.operands[0]);
      std::string rhs = unparse_expr(e.operands[1]);
      if (needs_parens(e.operands[0], e.binary_op, false)) lhs = "(" + lhs + ")";
      if (needs_parens(e.operands[1], e.binary_op, true)) rhs = "(" + rhs + ")";
      return lhs + " " + std::string(spelling(e.binary_op)) + " " + rhs;
    }
  }
  return {};
}

inline void unparse_block(const std::vector<Stmt>& block, int depth, std::string& out) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  for (const Stmt& s : block) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
        out += indent + s.target + " = " + unparse_expr(s.expr) + ";\n";
        break;
      case Stmt::Kind::Print:
        out += indent + "print(" + unparse_expr(s.expr) + ");\n";
        break;
      case Stmt::Kind::If:
        out += indent + "if (" + unparse_expr(s.expr) + ") {\n";
        unparse_block(s.body, depth + 1, out);
        if (s.else_body.empty()) {
          out += indent + "}\n";
        } else {
          out += indent + "} else {\n";
          unparse_block(s.else_body, depth + 1, out);
          out += indent + "}\n";
        }
        break;
      case Stmt::Kind::While:
        out += indent + "while (" + unparse_expr(s.expr) + ") {\n";
        unparse_block(s.body, depth + 1, out);
        out += indent + "}\n";
        break;
    }
  }
}

}  // namespace detail

inline std::string unparse_expression(const Expr& e) { return detail::unparse_expr(e); }

inline std::string unparse(const Ast& ast) {
  std::string out;
  if (!ast.inputs.empty()) {
    out += "input ";
    for (std::size_t i = 0; i < ast.inputs.size(); ++i) {
      if (i) out += ", ";
      out += ast.inputs[i];
    }
    out += ";\n";
  }
  detail::unparse_block(ast.statements, 0, out);
  return out;
}

inline SourceProgram unparse(const Ast& ast, std::string name) {
  return SourceProgram{std::move(name), unparse(ast)};
}

}  // namespace ppdg
