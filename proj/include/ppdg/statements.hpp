#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ppdg/ast.hpp"
#include "ppdg/unparse.hpp"

namespace ppdg {

struct StatementInfo {
  StmtId id;
  Stmt::Kind kind = Stmt::Kind::Assign;
  bool predicate = false;
  std::set<std::string> used;
  std::optional<std::string> defined;
};

/// One entry per statement in id order.
inline std::vector<StatementInfo> list_statements(const Ast& ast) {
  std::vector<StatementInfo> out;
  for_each_stmt(ast, [&](const Stmt& s) {
    StatementInfo info;
    info.id = s.id;
    info.kind = s.kind;
    info.predicate = s.is_predicate();
    for_each_variable_read(s.expr, [&](const std::string& v) { info.used.insert(v); });
    if (s.kind == Stmt::Kind::Assign) info.defined = s.target;
    out.push_back(std::move(info));
  });
  return out;
}

/// Short source-like label for a statement header ("x = a + 1", "while (n > 0)").
inline std::string statement_label(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Assign: return s.target + " = " + unparse_expression(s.expr);
    case Stmt::Kind::Print: return "print(" + unparse_expression(s.expr) + ")";
    case Stmt::Kind::If: return "if (" + unparse_expression(s.expr) + ")";
    case Stmt::Kind::While: return "while (" + unparse_expression(s.expr) + ")";
  }
  return {};
}

}  // namespace ppdg
