#include <gtest/gtest.h>

#include <limits>

#include "oracles.hpp"

using namespace ppdg;

namespace {

NodeId n(int v) { return NodeId{v}; }

ExecutionResult run(const std::string& text, TestCase test, std::uint64_t budget = kDefaultStepBudget) {
  const Ast ast = parse(text);
  return execute(ast, transform_pdg(build_pdg(ast)), test, budget);
}

std::vector<TraceEvent> events(std::initializer_list<std::pair<int, const char*>> list) {
  std::vector<TraceEvent> out;
  for (const auto& [node, state] : list) out.push_back(TraceEvent{n(node), state});
  return out;
}

}  // namespace

TEST(Tracer, StraightLineSignStates) {
  const auto r = run("x = 0 - 3; print(x);", TestCase{"t", {}, {-3}});
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_EQ(r.output, std::vector<std::int64_t>{-3});
  EXPECT_EQ(r.trace.events, events({{1, "NEG"}, {2, "NEG"}}));
}

TEST(Tracer, CountdownFromTwoHandSimulated) {
  // Aux 3 shadows node 2 for the predicate, aux 4 shadows node 2 for itself.
  // Each aux fires just before its target once node 2 has a state.
  const auto r = run("input n; while (n > 0) { n = n - 1; }", TestCase{"t", {{"n", 2}}, {}});
  EXPECT_EQ(r.trace.events, events({{1, "TRUE"},
                                    {2, "POS"},
                                    {3, "POS"},
                                    {1, "TRUE"},
                                    {4, "POS"},
                                    {2, "ZERO"},
                                    {3, "ZERO"},
                                    {1, "FALSE"}}));
  EXPECT_EQ(r.steps, 5u);
}

TEST(Tracer, DivisionByZeroCrashesBeforeTheFaultingEvent) {
  const auto r = run("x = 1; y = x / 0; print(y);", TestCase{"t", {}, {}});
  EXPECT_EQ(r.verdict, Verdict::Crash);
  EXPECT_EQ(r.trace.events, events({{1, "POS"}}));
  EXPECT_EQ(r.covered, (std::set<StmtId>{StmtId{1}, StmtId{2}}));
  EXPECT_FALSE(r.fault.empty());
  EXPECT_EQ(run("x = 1 % 0;", TestCase{"t", {}, {}}).verdict, Verdict::Crash);
}

TEST(Tracer, StepBudgetEndsRunawayLoops) {
  const auto r = run("while (1) { }", TestCase{"t", {}, {}}, 50);
  EXPECT_EQ(r.verdict, Verdict::Crash);
  EXPECT_EQ(r.steps, 50u);
  EXPECT_EQ(r.trace.events.size(), 50u);
}

TEST(Tracer, WrappingArithmeticAndShortCircuit) {
  const std::int64_t max = std::numeric_limits<std::int64_t>::max();
  const std::int64_t min = std::numeric_limits<std::int64_t>::min();
  const auto r = run("input a, b; print(a + 1); print(b / -1); print(b % -1); print(0 && 1 / 0); print(1 || 1 % 0);",
                     TestCase{"t", {{"a", max}, {"b", min}}, {min, min, 0, 0, 1}});
  EXPECT_EQ(r.verdict, Verdict::Pass);
}

TEST(Tracer, VerdictComparesOutputs) {
  EXPECT_EQ(run("print(1);", TestCase{"t", {}, {2}}).verdict, Verdict::Fail);
  EXPECT_EQ(run("print(1);", TestCase{"t", {}, {1, 1}}).verdict, Verdict::Fail);
}

TEST(Tracer, InputBindingsAreChecked) {
  EXPECT_THROW(run("input a; print(a);", TestCase{"t", {}, {}}), std::invalid_argument);
  EXPECT_THROW(run("input a; print(a);", TestCase{"t", {{"a", 1}, {"b", 2}}, {}}), std::invalid_argument);
}

TEST(RunSuite, EmptySuite) {
  const Ast ast = parse("print(1);");
  EXPECT_TRUE(run_suite(ast, transform_pdg(build_pdg(ast)), TestSuite{}).empty());
}

TEST(RunSuite, OneKnownFaultyCase) {
  const Ast ast = parse("input a; print(10 / a);");
  const TestSuite suite{"p", {{"a", {{"a", 2}}, {5}}, {"b", {{"a", 0}}, {}}, {"c", {{"a", 5}}, {2}}}};
  const auto tpdg = transform_pdg(build_pdg(ast));
  const auto first = run_suite(ast, tpdg, suite);
  ASSERT_EQ(first.size(), 3u);
  EXPECT_EQ(std::count_if(first.begin(), first.end(), [](const auto& r) { return is_failing(r.verdict); }), 1);
  EXPECT_EQ(first[1].verdict, Verdict::Crash);
  EXPECT_EQ(run_suite(ast, tpdg, suite), first);
}

TEST(RunSuite, CorpusTracesConformAndMatchCoverage) {
  for (const auto& p : oracle::load_corpus()) {
    const auto tpdg = transform_pdg(build_pdg(p.ast));
    const Ppdg skel = assign_state_spaces(tpdg, p.ast);
    for (const auto& r : run_suite(p.ast, tpdg, p.suite)) {
      EXPECT_EQ(r.verdict, Verdict::Pass) << p.name << " " << r.test_id;
      EXPECT_NO_THROW(validate_trace(skel, r.trace)) << p.name;
      std::set<StmtId> seen;
      for (const auto& e : r.trace.events) {
        if (e.node.value <= p.ast.statement_count) seen.insert(StmtId{e.node.value});
      }
      EXPECT_EQ(seen, r.covered) << p.name << " " << r.test_id;
    }
  }
}

TEST(RunSuite, GoldenOutputs) {
  const Ast ast = parse("input a; print(a * 2);");
  const auto tpdg = transform_pdg(build_pdg(ast));
  const TestSuite golden = with_golden_outputs(ast, tpdg, TestSuite{"p", {{"x", {{"a", 4}}, {}}}});
  EXPECT_EQ(golden.cases[0].expected, std::vector<std::int64_t>{8});
  EXPECT_THROW(with_golden_outputs(parse("input a; print(1 / a);"), transform_pdg(build_pdg(parse("input a; print(1 / a);"))),
                                   TestSuite{"p", {{"x", {{"a", 0}}, {}}}}),
               std::runtime_error);
}

TEST(SuiteJson, RoundTripAndDuplicates) {
  const TestSuite s{"p.mini", {{"a", {{"x", -1}}, {1, 2}}, {"b", {}, {}}}};
  EXPECT_EQ(suite_from_json(to_json(s)), s);
  const auto dup = nlohmann::json::parse(R"({"cases":[{"id":"a"},{"id":"a"}]})");
  EXPECT_THROW(suite_from_json(dup), std::invalid_argument);
}
