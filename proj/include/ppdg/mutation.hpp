#pragma once

// Single-site mutation operators over MiniLang expressions.
//
//   AOR  + - * / %        swapped within the arithmetic family
//   ROR  < <= > >= == !=  swapped within the relational family
//   LOR  && ||            swapped
//   CRP  literal c        -> c+1, c-1, -c
//   VRP  variable read    -> another program variable, kept only when the
//                            mutant still passes definite assignment
//
// Sites are numbered per statement in textual (in-order) position of the
// statement's own expression, starting at 0.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppdg/ast.hpp"
#include "ppdg/interpreter.hpp"
#include "ppdg/parser.hpp"
#include "ppdg/pdg.hpp"
#include "ppdg/transform.hpp"
#include "ppdg/unparse.hpp"

namespace ppdg {

enum class MutationOperator { AOR, ROR, LOR, CRP, VRP };

inline constexpr MutationOperator kAllOperators[] = {MutationOperator::AOR, MutationOperator::ROR,
                                                     MutationOperator::LOR, MutationOperator::CRP,
                                                     MutationOperator::VRP};

constexpr std::string_view operator_name(MutationOperator op) {
  switch (op) {
    case MutationOperator::AOR: return "AOR";
    case MutationOperator::ROR: return "ROR";
    case MutationOperator::LOR: return "LOR";
    case MutationOperator::CRP: return "CRP";
    case MutationOperator::VRP: return "VRP";
  }
  return "?";
}

inline MutationOperator parse_operator(std::string_view s) {
  for (MutationOperator op : kAllOperators) {
    if (operator_name(op) == s) return op;
  }
  throw std::invalid_argument("unknown mutation operator '" + std::string(s) + "'");
}

/// "AOR,ROR" -> {AOR, ROR}; duplicates collapse, order follows kAllOperators.
inline std::vector<MutationOperator> parse_operator_list(std::string_view list) {
  std::set<MutationOperator> ops;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = list.find(',', start);
    std::string_view item = list.substr(start, comma == std::string_view::npos ? list.npos : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) ops.insert(parse_operator(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return {ops.begin(), ops.end()};
}

struct MutationSite {
  StmtId stmt;
  int position = 0;
  friend auto operator<=>(const MutationSite&, const MutationSite&) = default;
};

struct Mutant {
  std::string id;
  std::string base;  // base program name
  MutationSite site;
  MutationOperator op = MutationOperator::AOR;
  std::string original;     // token before mutation
  std::string replacement;  // token after mutation
  Ast mutated;

  StmtId faulty_stmt() const { return site.stmt; }
};

namespace detail {

// Visits expression nodes in textual order, numbering each node's own token.
template <class Fn>
void for_each_site(Expr& e, int& position, Fn& fn) {
  switch (e.kind) {
    case Expr::Kind::Literal:
    case Expr::Kind::Variable:
      fn(e, position++);
      return;
    case Expr::Kind::Unary:
      fn(e, position++);
      for_each_site(e.operands[0], position, fn);
      return;
    case Expr::Kind::Binary:
      for_each_site(e.operands[0], position, fn);
      fn(e, position++);
      for_each_site(e.operands[1], position, fn);
      return;
  }
}

inline Expr* find_site(Ast& ast, MutationSite site) {
  Expr* found = nullptr;
  for_each_stmt(ast, [&](Stmt& s) {
    if (s.id != site.stmt) return;
    int pos = 0;
    auto pick = [&](Expr& e, int p) {
      if (p == site.position) found = &e;
    };
    for_each_site(s.expr, pos, pick);
  });
  return found;
}

inline std::vector<BinaryOp> family_members(OpFamily f) {
  switch (f) {
    case OpFamily::Arithmetic:
      return {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Mod};
    case OpFamily::Relational:
      return {BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge, BinaryOp::Eq, BinaryOp::Ne};
    case OpFamily::Logical:
      return {BinaryOp::And, BinaryOp::Or};
  }
  return {};
}

constexpr MutationOperator operator_for(OpFamily f) {
  switch (f) {
    case OpFamily::Arithmetic: return MutationOperator::AOR;
    case OpFamily::Relational: return MutationOperator::ROR;
    case OpFamily::Logical: return MutationOperator::LOR;
  }
  return MutationOperator::AOR;
}

inline std::vector<std::int64_t> constant_replacements(std::int64_t c) {
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
  std::vector<std::int64_t> out;
  auto add = [&](std::int64_t v) {
    if (v != c && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  if (c != kMax) add(c + 1);
  if (c != kMin) add(c - 1);
  if (c != 0 && c != kMin) add(-c);
  return out;
}

inline std::vector<std::string> program_variables(const Ast& ast) {
  std::set<std::string> vars(ast.inputs.begin(), ast.inputs.end());
  for_each_stmt(ast, [&](const Stmt& s) {
    if (s.kind == Stmt::Kind::Assign) vars.insert(s.target);
  });
  return {vars.begin(), vars.end()};
}

}  // namespace detail

/// Every legal single-site mutant for the selected operators, ordered by
/// (statement, site position, operator, replacement).
inline std::vector<Mutant> enumerate_mutants(const Ast& ast, std::span<const MutationOperator> operators,
                                             const std::string& base_name = "program") {
  const std::set<MutationOperator> enabled(operators.begin(), operators.end());
  const std::vector<std::string> variables = detail::program_variables(ast);
  std::vector<Mutant> out;

  // Collect sites on a scratch copy so positions are computed once.
  struct Candidate {
    MutationSite site;
    MutationOperator op;
    std::string original;
    std::string replacement;
    Expr replaced;
  };
  std::vector<Candidate> candidates;
  Ast scratch = ast;
  for_each_stmt(scratch, [&](Stmt& s) {
    int pos = 0;
    auto visit = [&](Expr& e, int p) {
      const MutationSite site{s.id, p};
      switch (e.kind) {
        case Expr::Kind::Binary: {
          const MutationOperator op = detail::operator_for(family(e.binary_op));
          if (!enabled.contains(op)) return;
          for (BinaryOp alt : detail::family_members(family(e.binary_op))) {
            if (alt == e.binary_op) continue;
            Expr r = e;
            r.binary_op = alt;
            candidates.push_back(Candidate{site, op, std::string(spelling(e.binary_op)),
                                           std::string(spelling(alt)), std::move(r)});
          }
          return;
        }
        case Expr::Kind::Literal:
          if (!enabled.contains(MutationOperator::CRP)) return;
          for (std::int64_t v : detail::constant_replacements(e.value)) {
            candidates.push_back(Candidate{site, MutationOperator::CRP, std::to_string(e.value), std::to_string(v),
                                           Expr::literal(v)});
          }
          return;
        case Expr::Kind::Variable:
          if (!enabled.contains(MutationOperator::VRP)) return;
          for (const std::string& v : variables) {
            if (v == e.name) continue;
            candidates.push_back(Candidate{site, MutationOperator::VRP, e.name, v, Expr::variable(v)});
          }
          return;
        case Expr::Kind::Unary:
          return;
      }
    };
    detail::for_each_site(s.expr, pos, visit);
  });

  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.site != b.site) return a.site < b.site;
    return a.op < b.op;
  });

  for (Candidate& c : candidates) {
    Ast mutated = ast;
    Expr* target = detail::find_site(mutated, c.site);
    if (!target) continue;
    // Replace only the node's own token; operands stay untouched.
    if (target->kind == Expr::Kind::Binary) {
      target->binary_op = c.replaced.binary_op;
    } else {
      *target = c.replaced;
    }
    if (check_definite_assignment(mutated)) continue;
    Mutant m;
    m.base = base_name;
    m.site = c.site;
    m.op = c.op;
    m.original = std::move(c.original);
    m.replacement = std::move(c.replacement);
    m.mutated = std::move(mutated);
    out.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "m%03zu", i + 1);
    out[i].id = base_name + "-" + buf;
  }
  return out;
}

inline std::vector<Mutant> enumerate_mutants(const Ast& ast, std::initializer_list<MutationOperator> operators,
                                             const std::string& base_name = "program") {
  return enumerate_mutants(ast, std::span<const MutationOperator>(operators.begin(), operators.size()), base_name);
}

enum class MutantClass { Killed, EquivalentOnSuite, NoPassing };

constexpr std::string_view mutant_class_name(MutantClass c) {
  switch (c) {
    case MutantClass::Killed: return "KILLED";
    case MutantClass::EquivalentOnSuite: return "EQUIVALENT_ON_SUITE";
    case MutantClass::NoPassing: return "NO_PASSING";
  }
  return "?";
}

struct Classification {
  MutantClass kind = MutantClass::EquivalentOnSuite;
  std::vector<std::string> failing;  // test ids, suite order
  std::vector<std::string> passing;
  std::vector<ExecutionResult> results;
};

/// Runs the suite (expected outputs from the unmutated program) on the
/// mutant. An empty suite classifies as EQUIVALENT_ON_SUITE.
inline Classification classify_mutant(const Mutant& mutant, const TestSuite& golden_suite,
                                      std::uint64_t step_budget = kDefaultStepBudget) {
  const TransformedPdg tpdg = transform_pdg(build_pdg(mutant.mutated));
  Classification c;
  c.results = run_suite(mutant.mutated, tpdg, golden_suite, step_budget);
  for (const ExecutionResult& r : c.results) (is_failing(r.verdict) ? c.failing : c.passing).push_back(r.test_id);
  if (c.failing.empty()) {
    c.kind = MutantClass::EquivalentOnSuite;
  } else if (c.passing.empty()) {
    c.kind = MutantClass::NoPassing;
  } else {
    c.kind = MutantClass::Killed;
  }
  return c;
}

inline nlohmann::json to_json(const Mutant& m) {
  return {{"id", m.id},
          {"base", m.base},
          {"site", {{"stmt", m.site.stmt.value}, {"position", m.site.position}}},
          {"operator", std::string(operator_name(m.op))},
          {"original", m.original},
          {"replacement", m.replacement},
          {"faultyStmtId", m.faulty_stmt().value},
          {"sourceText", unparse(m.mutated)}};
}

/// Reads a manifest; also the entry point for hand-seeded faults, where only
/// base, faultyStmtId and sourceText are required.
inline Mutant mutant_from_json(const nlohmann::json& j) {
  Mutant m;
  m.id = j.value("id", std::string("hand"));
  m.base = j.at("base").get<std::string>();
  m.mutated = parse(j.at("sourceText").get<std::string>());
  const int faulty = j.at("faultyStmtId").get<int>();
  if (faulty < 1 || faulty > m.mutated.statement_count) {
    throw std::invalid_argument("faultyStmtId " + std::to_string(faulty) + " is not a statement of the mutant");
  }
  m.site = MutationSite{StmtId{faulty}, 0};
  if (j.contains("site")) m.site.position = j.at("site").value("position", 0);
  m.op = parse_operator(j.value("operator", std::string("AOR")));
  m.original = j.value("original", std::string());
  m.replacement = j.value("replacement", std::string());
  return m;
}

}  // namespace ppdg
