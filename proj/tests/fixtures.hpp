#pragma once

// Hand-built models and traces with rankings traced manually.
// Shared by the unit tests and the acceptance binary.

#include <string>
#include <vector>

#include "ppdg/ppdg.hpp"

namespace fixture {

using ppdg::NodeId;

// Straight line: 1 -> 2 -> 3 through data edges. States NEG=0, ZERO=1, POS=2.
//   p(1)          NEG 1/4  ZERO 1/4  POS 2/4
//   p(2 | 1=POS)  NEG 1/4            POS 3/4
//   p(2 | 1=NEG)  NEG 1
//   p(3 | 2=POS)                     POS 1
//   p(3 | 2=NEG)  NEG 1/2            POS 1/2
inline ppdg::Ppdg chain_model() {
  const ppdg::Ast ast = ppdg::parse("input a; x = a; y = x; print(y);");
  ppdg::Ppdg m = ppdg::assign_state_spaces(ppdg::transform_pdg(ppdg::build_pdg(ast)), ast);
  constexpr int kNeg = 0, kZero = 1, kPos = 2;
  m.increment(NodeId{1}, {}, kNeg);
  m.increment(NodeId{1}, {}, kZero);
  m.increment(NodeId{1}, {}, kPos, 2);
  m.increment(NodeId{2}, {kPos}, kNeg);
  m.increment(NodeId{2}, {kPos}, kPos, 3);
  m.increment(NodeId{2}, {kNeg}, kNeg);
  m.increment(NodeId{3}, {kPos}, kPos);
  m.increment(NodeId{3}, {kNeg}, kNeg);
  m.increment(NodeId{3}, {kNeg}, kPos);
  return m;
}

struct Expected {
  int node;
  double prob;
  std::size_t index;
  std::string configuration;
};

struct Case {
  std::string name;
  ppdg::NodeStateTrace trace;
  std::vector<Expected> ranking;
};

inline ppdg::NodeStateTrace failing(std::string id, std::vector<std::pair<int, std::string>> events) {
  ppdg::NodeStateTrace t{std::move(id), ppdg::Verdict::Fail, {}};
  for (auto& [node, state] : events) t.events.push_back(ppdg::TraceEvent{NodeId{node}, std::move(state)});
  return t;
}

inline std::vector<Case> ranking_cases() {
  return {
      // Nodes 1 and 3 tie at 1/2; the earlier index wins.
      {"tie broken by index",
       failing("a", {{1, "POS"}, {2, "NEG"}, {3, "NEG"}}),
       {{2, 0.25, 2, "2=NEG | 1=POS"}, {1, 0.5, 1, "1=POS"}, {3, 0.5, 3, "3=NEG | 2=NEG"}}},
      // Node 2 reaches 1/4 at index 3 and again at 4; the first is kept.
      {"repeated minimum keeps first occurrence",
       failing("b", {{1, "POS"}, {2, "POS"}, {2, "NEG"}, {2, "NEG"}, {3, "NEG"}}),
       {{2, 0.25, 3, "2=NEG | 1=POS"}, {1, 0.5, 1, "1=POS"}, {3, 0.5, 5, "3=NEG | 2=NEG"}}},
      // Node 2 runs before its parent (unseen configuration, 0); node 3 hits a
      // zero-count state at index 5 and ties with it at 0.
      {"not executed parent and zero-count state",
       failing("c", {{2, "POS"}, {1, "NEG"}, {2, "NEG"}, {1, "POS"}, {3, "ZERO"}, {3, "POS"}}),
       {{2, 0.0, 1, "2=POS | 1=NOT_EXECUTED"}, {3, 0.0, 5, "3=ZERO | 2=NEG"}, {1, 0.25, 2, "1=NEG"}}},
  };
}

/// Lowest probabilities reported for the loop example's nodes 5, 8 and 10.
inline std::vector<ppdg::RankEntry> loop_example_entries() {
  std::vector<ppdg::RankEntry> entries;
  entries.push_back(ppdg::RankEntry{NodeId{5}, 0.6, 2, "POS", {}});
  entries.push_back(ppdg::RankEntry{NodeId{8}, 0.5, 4, "TRUE", {}});
  entries.push_back(ppdg::RankEntry{NodeId{10}, 0.4, 6, "POS", {}});
  return entries;
}

}  // namespace fixture
