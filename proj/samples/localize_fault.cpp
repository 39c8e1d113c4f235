// Seeds a wrong loop bound into a countdown program, trains a PPDG on the
// passing runs and ranks the nodes of the first failing run.
#include <iostream>

#include "ppdg/ppdg.hpp"

int main() {
  using namespace ppdg;

  const Ast correct = parse("input n; i = n; s = 0; while (i > 0) { s = s + i; i = i - 1; } print(s); print(i);");
  const Ast faulty = parse("input n; i = n; s = 0; while (i >= 0) { s = s + i; i = i - 1; } print(s); print(i);");

  TestSuite suite{"countdown", {}};
  for (std::int64_t n : {-3, -1, 0, 1, 2, 5}) {
    suite.cases.push_back(TestCase{"n" + std::to_string(n), {{"n", n}}, {}});
  }
  suite = with_golden_outputs(correct, transform_pdg(build_pdg(correct)), suite);

  const TransformedPdg tpdg = transform_pdg(build_pdg(faulty));
  const auto results = run_suite(faulty, tpdg, suite);

  std::vector<NodeStateTrace> passing;
  const NodeStateTrace* failing = nullptr;
  for (const auto& r : results) {
    if (r.verdict == Verdict::Pass) {
      passing.push_back(r.trace);
    } else if (!failing) {
      failing = &r.trace;
    }
  }
  if (passing.empty() || !failing) {
    std::cerr << "need at least one passing and one failing run\n";
    return 1;
  }

  const Ppdg model = learn_params(passing, assign_state_spaces(tpdg, faulty));
  std::cout << "RankCP for " << failing->test_id << " (fault at statement 3)\n" << to_csv(rank_cp(*failing, model));
  std::cout << "\nSBI over the suite\n" << to_csv(sbi_scores(results, faulty.statement_count));
}
