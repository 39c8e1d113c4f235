#pragma once

// Deterministic MiniLang interpreter that records a node-state trace over a
// transformed PDG and grades the run against expected output.

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppdg/ast.hpp"
#include "ppdg/model.hpp"
#include "ppdg/trace.hpp"
#include "ppdg/transform.hpp"

namespace ppdg {

inline constexpr std::uint64_t kDefaultStepBudget = 1'000'000;

struct TestCase {
  std::string id;
  std::map<std::string, std::int64_t> inputs;
  std::vector<std::int64_t> expected;
  friend bool operator==(const TestCase&, const TestCase&) = default;
};

struct TestSuite {
  std::string program;
  std::vector<TestCase> cases;
  friend bool operator==(const TestSuite&, const TestSuite&) = default;
};

struct ExecutionResult {
  std::string test_id;
  std::vector<std::int64_t> output;
  Verdict verdict = Verdict::Pass;
  NodeStateTrace trace;
  std::uint64_t steps = 0;
  /// Statements whose execution started; includes a statement that faulted
  /// and therefore has no trace event.
  std::set<StmtId> covered;
  std::string fault;  // empty unless CRASH
  friend bool operator==(const ExecutionResult&, const ExecutionResult&) = default;
};

namespace detail {

struct RuntimeFault {
  std::string message;
};

// Two's-complement wrapping arithmetic; MiniLang integers never trap on
// overflow, only on division by zero.
inline std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
inline std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
inline std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

template <StateAbstraction Abstraction>
class Interpreter {
 public:
  Interpreter(const TransformedPdg& tpdg, std::uint64_t budget, const Abstraction& abstraction)
      : budget_(budget), abstraction_(abstraction), values_(abstraction.value_states()) {
    for (const auto& [aux, info] : tpdg.aux) feeding_[info.target].emplace_back(aux, info.shadowed);
  }

  void run(const Ast& ast, const TestCase& test, ExecutionResult& result) {
    result_ = &result;
    for (const std::string& in : ast.inputs) {
      auto it = test.inputs.find(in);
      if (it == test.inputs.end()) {
        throw std::invalid_argument("test '" + test.id + "' does not bind input '" + in + "'");
      }
      env_[in] = it->second;
    }
    for (const auto& [name, value] : test.inputs) {
      if (!env_.contains(name)) {
        throw std::invalid_argument("test '" + test.id + "' binds undeclared input '" + name + "'");
      }
    }
    try {
      block(ast.statements);
    } catch (const RuntimeFault& f) {
      result.verdict = Verdict::Crash;
      result.fault = f.message;
    }
    result.steps = steps_;
  }

 private:
  void emit(NodeId node, const std::string& state) {
    result_->trace.events.push_back(TraceEvent{node, state});
    latest_[node] = state;
  }

  // One step per statement execution, loop predicate evaluations included.
  void enter(const Stmt& s) {
    if (steps_ >= budget_) {
      throw RuntimeFault{"step budget of " + std::to_string(budget_) + " exhausted"};
    }
    ++steps_;
    result_->covered.insert(s.id);
    auto it = feeding_.find(node_of(s.id));
    if (it == feeding_.end()) return;
    for (const auto& [aux, shadowed] : it->second) {
      auto src = latest_.find(shadowed);
      if (src != latest_.end()) emit(aux, src->second);
    }
  }

  void block(const std::vector<Stmt>& stmts) {
    for (const Stmt& s : stmts) statement(s);
  }

  void statement(const Stmt& s) {
    const NodeId node = node_of(s.id);
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        enter(s);
        const std::int64_t v = eval(s.expr);
        env_[s.target] = v;
        emit(node, value_state(v));
        return;
      }
      case Stmt::Kind::Print: {
        enter(s);
        const std::int64_t v = eval(s.expr);
        result_->output.push_back(v);
        emit(node, value_state(v));
        return;
      }
      case Stmt::Kind::If: {
        enter(s);
        const bool taken = eval(s.expr) != 0;
        emit(node, predicate_states()[taken ? 0 : 1]);
        block(taken ? s.body : s.else_body);
        return;
      }
      case Stmt::Kind::While:
        for (;;) {
          enter(s);
          const bool taken = eval(s.expr) != 0;
          emit(node, predicate_states()[taken ? 0 : 1]);
          if (!taken) return;
          block(s.body);
        }
    }
  }

  const std::string& value_state(std::int64_t v) const {
    return values_.at(static_cast<std::size_t>(abstraction_.classify(v)));
  }

  std::int64_t eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Literal:
        return e.value;
      case Expr::Kind::Variable:
        return env_.at(e.name);
      case Expr::Kind::Unary: {
        const std::int64_t v = eval(e.operands[0]);
        return e.unary_op == UnaryOp::Neg ? wrap_sub(0, v) : static_cast<std::int64_t>(v == 0);
      }
      case Expr::Kind::Binary:
        break;
    }
    if (e.binary_op == BinaryOp::And) {
      return eval(e.operands[0]) != 0 && eval(e.operands[1]) != 0;
    }
    if (e.binary_op == BinaryOp::Or) {
      return eval(e.operands[0]) != 0 || eval(e.operands[1]) != 0;
    }
    const std::int64_t a = eval(e.operands[0]);
    const std::int64_t b = eval(e.operands[1]);
    constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
    switch (e.binary_op) {
      case BinaryOp::Add: return wrap_add(a, b);
      case BinaryOp::Sub: return wrap_sub(a, b);
      case BinaryOp::Mul: return wrap_mul(a, b);
      case BinaryOp::Div:
        if (b == 0) throw RuntimeFault{"division by zero"};
        return (a == kMin && b == -1) ? kMin : a / b;
      case BinaryOp::Mod:
        if (b == 0) throw RuntimeFault{"modulo by zero"};
        return (a == kMin && b == -1) ? 0 : a % b;
      case BinaryOp::Lt: return a < b;
      case BinaryOp::Le: return a <= b;
      case BinaryOp::Gt: return a > b;
      case BinaryOp::Ge: return a >= b;
      case BinaryOp::Eq: return a == b;
      case BinaryOp::Ne: return a != b;
      case BinaryOp::And:
      case BinaryOp::Or:
        break;
    }
    return 0;
  }

  std::uint64_t budget_;
  const Abstraction& abstraction_;
  std::vector<std::string> values_;
  std::map<NodeId, std::vector<std::pair<NodeId, NodeId>>> feeding_;  // target -> (aux, shadowed)
  std::map<std::string, std::int64_t> env_;
  std::map<NodeId, std::string> latest_;
  std::uint64_t steps_ = 0;
  ExecutionResult* result_ = nullptr;
};

}  // namespace detail

/// Runs one test. Division or modulo by zero and budget exhaustion end the
/// run with a CRASH verdict; the trace then stops before the faulting node.
/// Throws std::invalid_argument only when the test's bindings do not match
/// the program's declared inputs.
template <StateAbstraction Abstraction = SignAbstraction>
ExecutionResult execute(const Ast& ast, const TransformedPdg& tpdg, const TestCase& test,
                        std::uint64_t step_budget = kDefaultStepBudget, const Abstraction& abstraction = {}) {
  ExecutionResult result;
  result.test_id = test.id;
  detail::Interpreter<Abstraction>(tpdg, step_budget, abstraction).run(ast, test, result);
  if (result.verdict != Verdict::Crash) {
    result.verdict = result.output == test.expected ? Verdict::Pass : Verdict::Fail;
  }
  result.trace.test_id = test.id;
  result.trace.verdict = result.verdict;
  return result;
}

/// One result per case, in suite order.
template <StateAbstraction Abstraction = SignAbstraction>
std::vector<ExecutionResult> run_suite(const Ast& ast, const TransformedPdg& tpdg, const TestSuite& suite,
                                       std::uint64_t step_budget = kDefaultStepBudget,
                                       const Abstraction& abstraction = {}) {
  std::vector<ExecutionResult> results;
  results.reserve(suite.cases.size());
  for (const TestCase& c : suite.cases) results.push_back(execute(ast, tpdg, c, step_budget, abstraction));
  return results;
}

/// Replaces every expected output with what `ast` prints (golden run). Throws
/// if the reference program crashes on a case.
inline TestSuite with_golden_outputs(const Ast& ast, const TransformedPdg& tpdg, TestSuite suite,
                                     std::uint64_t step_budget = kDefaultStepBudget) {
  for (TestCase& c : suite.cases) {
    const ExecutionResult r = execute(ast, tpdg, c, step_budget);
    if (r.verdict == Verdict::Crash) {
      throw std::runtime_error("reference program crashed on test '" + c.id + "': " + r.fault);
    }
    c.expected = r.output;
  }
  return suite;
}

inline nlohmann::json to_json(const TestSuite& suite) {
  nlohmann::json j;
  j["program"] = suite.program;
  j["cases"] = nlohmann::json::array();
  for (const TestCase& c : suite.cases) {
    j["cases"].push_back({{"id", c.id}, {"inputs", c.inputs}, {"expected", c.expected}});
  }
  return j;
}

inline TestSuite suite_from_json(const nlohmann::json& j) {
  TestSuite suite;
  suite.program = j.value("program", std::string());
  std::set<std::string> ids;
  for (const auto& jc : j.at("cases")) {
    TestCase c;
    c.id = jc.at("id").get<std::string>();
    if (!ids.insert(c.id).second) throw std::invalid_argument("duplicate test id '" + c.id + "'");
    c.inputs = jc.value("inputs", std::map<std::string, std::int64_t>{});
    c.expected = jc.value("expected", std::vector<std::int64_t>{});
    suite.cases.push_back(std::move(c));
  }
  return suite;
}

}  // namespace ppdg
