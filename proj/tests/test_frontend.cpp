#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace ppdg;

namespace {

std::vector<int> ids_in_preorder(const Ast& ast) {
  std::vector<int> ids;
  for_each_stmt(ast, [&](const Stmt& s) { ids.push_back(s.id.value); });
  return ids;
}

ParseError::Kind parse_error_kind(std::string_view text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a parse error for: " << text;
  return ParseError::Kind::Syntax;
}

}  // namespace

TEST(Parser, TwoStatementProgram) {
  const Ast ast = parse("x = 1; print(x);");
  ASSERT_EQ(ast.statement_count, 2);
  ASSERT_EQ(ast.statements.size(), 2u);
  EXPECT_EQ(ast.statements[0].id, StmtId{1});
  EXPECT_EQ(ast.statements[0].kind, Stmt::Kind::Assign);
  EXPECT_EQ(ast.statements[1].id, StmtId{2});
  EXPECT_EQ(ast.statements[1].kind, Stmt::Kind::Print);
}

TEST(Parser, WhileNumberedPreOrder) {
  const Ast ast = parse("input n; while (n > 0) { n = n - 1; } print(n);");
  ASSERT_EQ(ast.statements.size(), 2u);
  const Stmt& loop = ast.statements[0];
  EXPECT_EQ(loop.kind, Stmt::Kind::While);
  EXPECT_EQ(loop.id, StmtId{1});
  ASSERT_EQ(loop.body.size(), 1u);
  EXPECT_EQ(loop.body[0].id, StmtId{2});
  EXPECT_EQ(ast.statements[1].id, StmtId{3});
}

TEST(Parser, ReadOfNeverAssignedVariableIsRejected) {
  EXPECT_EQ(parse_error_kind("print(y);"), ParseError::Kind::UseBeforeAssignment);
}

TEST(Parser, DefiniteAssignmentFollowsBothBranchesAndLoops) {
  EXPECT_NO_THROW(parse("input c; if (c) { x = 1; } else { x = 2; } print(x);"));
  EXPECT_EQ(parse_error_kind("input c; if (c) { x = 1; } print(x);"), ParseError::Kind::UseBeforeAssignment);
  EXPECT_EQ(parse_error_kind("input c; while (c) { x = 1; c = 0; } print(x);"),
            ParseError::Kind::UseBeforeAssignment);
  EXPECT_EQ(parse_error_kind("x = x + 1;"), ParseError::Kind::UseBeforeAssignment);
}

TEST(Parser, SyntaxErrorsCarryPosition) {
  try {
    parse("x = 1;\ny = ;");
    FAIL() << "expected syntax error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::Syntax);
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_EQ(parse_error_kind("input a, a; print(a);"), ParseError::Kind::DuplicateInput);
  EXPECT_EQ(parse_error_kind("x = 1"), ParseError::Kind::Syntax);
  EXPECT_EQ(parse_error_kind("while (1) { print(1);"), ParseError::Kind::Syntax);
  EXPECT_EQ(parse_error_kind("x = 1; input a;"), ParseError::Kind::Syntax);
  EXPECT_THROW(parse(SourceProgram{"empty", ""}), ParseError);
}

TEST(Parser, PrecedenceAndAssociativity) {
  const Ast ast = parse("x = 1 + 2 * 3 - 4; y = 10 - 3 - 2; z = 1 < 2 && 3 == 3 || 0;");
  EXPECT_EQ(unparse_expression(ast.statements[0].expr), "(1 + (2 * 3)) - 4");
  EXPECT_EQ(unparse_expression(ast.statements[1].expr), "(10 - 3) - 2");
  EXPECT_EQ(unparse_expression(ast.statements[2].expr), "(1 < 2 && 3 == 3) || 0");
}

TEST(Parser, NegativeLiteralOnlyAfterNonOperand) {
  const Ast ast = parse("a = -3; b = a -3; c = (a)-3; d = - 3;");
  EXPECT_EQ(ast.statements[0].expr, Expr::literal(-3));
  EXPECT_EQ(ast.statements[1].expr.kind, Expr::Kind::Binary);
  EXPECT_EQ(ast.statements[2].expr.kind, Expr::Kind::Binary);
  EXPECT_EQ(ast.statements[3].expr, Expr::unary(UnaryOp::Neg, Expr::literal(3)));
}

TEST(Parser, StatementIdsAreDenseOnCorpus) {
  for (const auto& p : oracle::load_corpus()) {
    const auto ids = ids_in_preorder(p.ast);
    ASSERT_EQ(static_cast<int>(ids.size()), p.ast.statement_count) << p.name;
    for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(ids[i], static_cast<int>(i) + 1) << p.name;
  }
}

TEST(Unparse, RoundTripSingleAssignment) {
  const Ast ast = parse("x = 1;");
  EXPECT_EQ(parse(unparse(ast)), ast);
}

TEST(Unparse, RoundTripNested) {
  const Ast ast = parse(
      "input a, b; while (a > 0) { if (a % 2 == 0) { b = b + a; } else { while (b < 0) { b = b + 1; } } "
      "a = a - 1; } print(-b); print(- 5); print(!a);");
  EXPECT_EQ(parse(unparse(ast)), ast);
}

TEST(Unparse, CorpusIsAFixpoint) {
  for (const auto& p : oracle::load_corpus()) {
    const std::string once = unparse(p.ast);
    const Ast again = parse(once);
    EXPECT_EQ(again, p.ast) << p.name;
    EXPECT_EQ(unparse(again), once) << p.name;
  }
}

TEST(Unparse, OperatorSwapChangesOneToken) {
  Ast ast = parse("input a, b; x = a + b * 2; print(x);");
  const std::string before = unparse(ast);
  ast.statements[0].expr.binary_op = BinaryOp::Sub;
  EXPECT_EQ(oracle::token_diff(before, unparse(ast)), 1);
}

TEST(Unparse, NamedSourceProgram) {
  const SourceProgram sp = unparse(parse("x = 1;"), "one");
  EXPECT_EQ(sp.name, "one");
  EXPECT_EQ(parse(sp), parse("x = 1;"));
}

TEST(Statements, ListsKindsUsesAndDefs) {
  const auto two = list_statements(parse("x = 1; print(x);"));
  EXPECT_EQ(two.size(), 2u);

  const auto loop = list_statements(parse("input n; while (n > 0) { n = n - 1; }"));
  EXPECT_TRUE(loop[0].predicate);
  EXPECT_FALSE(loop[0].defined.has_value());

  const auto sum = list_statements(parse("input y, z; x = y + z;"));
  EXPECT_EQ(sum[0].used, (std::set<std::string>{"y", "z"}));
  EXPECT_EQ(sum[0].defined, std::optional<std::string>("x"));
}

// Random structured programs, judged by the checker and by walking the CFG.
namespace {

struct RandomProgram {
  std::mt19937 rng;
  std::vector<std::string> vars{"a", "b", "c"};
  int statements = 0;

  std::string expr() {
    std::uniform_int_distribution<int> pick(0, 3);
    switch (pick(rng)) {
      case 0: return std::to_string(pick(rng));
      case 1: return vars[static_cast<std::size_t>(pick(rng)) % vars.size()];
      default:
        return vars[static_cast<std::size_t>(pick(rng)) % vars.size()] + " + " +
               vars[static_cast<std::size_t>(pick(rng)) % vars.size()];
    }
  }

  std::string block(int depth) {
    std::string out;
    std::uniform_int_distribution<int> len(1, 3);
    const int n = len(rng);
    for (int i = 0; i < n && statements < 10; ++i) out += stmt(depth);
    return out;
  }

  std::string stmt(int depth) {
    ++statements;
    std::uniform_int_distribution<int> kind(0, depth < 2 ? 4 : 2);
    switch (kind(rng)) {
      case 0:
      case 1: return vars[static_cast<std::size_t>(kind(rng)) % vars.size()] + " = " + expr() + ";\n";
      case 2: return "print(" + expr() + ");\n";
      case 3: return "if (" + expr() + ") {\n" + block(depth + 1) + "} else {\n" + block(depth + 1) + "}\n";
      default: return "while (" + expr() + ") {\n" + block(depth + 1) + "}\n";
    }
  }
};

}  // namespace

TEST(DefiniteAssignment, AgreesWithPathEnumeration) {
  int rejected = 0;
  int accepted = 0;
  for (unsigned seed = 1; seed <= 400; ++seed) {
    RandomProgram gen{std::mt19937(seed)};
    const std::string text = "input a;\n" + gen.block(0);
    const Ast ast = parse_unchecked(text);
    const bool checker = check_definite_assignment(ast).has_value();
    EXPECT_EQ(checker, oracle::has_unassigned_read(ast)) << text;
    (checker ? rejected : accepted) += 1;
    if (checker) {
      EXPECT_THROW(parse(text), ParseError);
    } else {
      EXPECT_NO_THROW(parse(text));
    }
  }
  EXPECT_GT(rejected, 20);
  EXPECT_GT(accepted, 20);
}
