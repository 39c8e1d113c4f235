// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ppdg;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (ok) detail << "failed: ";
      else detail << "; ";
      detail << what;
      ok = false;
    }
  }
};

template <class Fn>
bool criterion(int id, const std::string& title, double limit_seconds, Fn&& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.require(elapsed < limit_seconds, "took " + std::to_string(elapsed) + " s, limit " +
                                           std::to_string(limit_seconds) + " s");
  std::printf("%s %d %s (%.2f s)%s%s\n", out.ok ? "PASS" : "FAIL", id, title.c_str(), elapsed,
              out.detail.str().empty() ? "" : ": ", out.detail.str().c_str());
  std::fflush(stdout);
  return out.ok;
}

NodeId n(int v) { return NodeId{v}; }

// line_reader: 1 reader = limit; 2 line = reader; 3 while (line > 0) {
// 4 print(line); 5 line = line - 1; }
void worked_example(Outcome& out) {
  const Ast ast = parse(oracle::slurp(oracle::corpus_dir() / "line_reader.mini"));
  out.require(ast.statement_count == 5, "line_reader has 5 statements");

  const Cfg cfg = build_cfg(ast);
  const auto succ = cfg.successors(n(3));
  bool t_body = false;
  bool f_exit = false;
  for (const auto& e : succ) {
    t_body |= e.to == n(4) && e.label == Branch::True;
    f_exit |= e.to == kExit && e.label == Branch::False;
  }
  out.require(succ.size() == 2 && t_body && f_exit, "(a) loop predicate has exactly T->body and F->exit");

  const Pdg pdg = build_pdg(ast);
  const bool carried = std::any_of(pdg.data_edges.begin(), pdg.data_edges.end(), [](const DefUse& d) {
    return d.def == n(5) && d.use == n(3) && d.variable == "line";
  });
  out.require(carried, "(b) loop-carried data edge 5->3 labelled 'line'");

  const TransformedPdg t = transform_pdg(pdg);
  int aux_parents = 0;
  for (NodeId p : t.parents(n(3))) {
    if (t.aux.contains(p)) {
      ++aux_parents;
      out.require(t.aux.at(p).shadowed == n(5) && t.aux.at(p).variable == "line", "(c) aux shadows 5 via 'line'");
    }
  }
  out.require(aux_parents == 1, "(c) exactly one aux parent of the loop predicate, got " + std::to_string(aux_parents));
  out.require(is_acyclic(t) && oracle::acyclic(t), "(d) transformed graph is a DAG");
}

std::vector<NodeStateTrace> learning_traces(const oracle::CorpusProgram& p, std::mt19937& rng) {
  const TransformedPdg tpdg = transform_pdg(build_pdg(p.ast));
  std::vector<NodeStateTrace> traces;
  for (const auto& r : run_suite(p.ast, tpdg, p.suite)) traces.push_back(r.trace);
  // Perturbed copies of the suite inputs widen the observed configurations.
  std::uniform_int_distribution<int> delta(-3, 3);
  for (int k = 0; k < 30; ++k) {
    TestCase c = p.suite.cases[static_cast<std::size_t>(k) % p.suite.cases.size()];
    c.id = "perturbed" + std::to_string(k);
    for (auto& [name, value] : c.inputs) value += delta(rng);
    const auto r = execute(p.ast, tpdg, c, 100000);
    if (r.verdict != Verdict::Crash) traces.push_back(r.trace);
  }
  return traces;
}

void learning(Outcome& out, const std::vector<oracle::CorpusProgram>& corpus) {
  std::mt19937 rng(11);
  std::size_t configs = 0;
  for (const auto& p : corpus) {
    auto traces = learning_traces(p, rng);
    const Ppdg skel = assign_state_spaces(transform_pdg(build_pdg(p.ast)), p.ast);
    const Ppdg model = learn_params(traces, skel);
    for (const auto& [node, table] : model.counts()) {
      for (const auto& [config, row] : table) {
        ++configs;
        double sum = 0;
        for (std::size_t s = 0; s < row.size(); ++s) sum += model.probability(node, static_cast<int>(s), config);
        out.require(std::abs(sum - 1.0) <= 1e-9, p.name + ": probabilities of node " + node_name(node) +
                                                     " sum to " + std::to_string(sum));
      }
    }
    out.require(oracle::flatten_counts(model) == oracle::recount(model, traces), p.name + ": counts differ from recount");
    const std::string reference = to_json(model).dump();
    for (int round = 0; round < 5; ++round) {
      std::shuffle(traces.begin(), traces.end(), rng);
      const Ppdg shuffled = learn_params(traces, skel);
      out.require(shuffled == model && to_json(shuffled).dump() == reference,
                  p.name + ": trace order changed the model");
    }
  }
  out.detail << corpus.size() << " programs, " << configs << " observed configurations";
}

void ranking(Outcome& out) {
  auto entries = fixture::loop_example_entries();
  std::mt19937 rng(5);
  for (int round = 0; round < 6; ++round) {
    std::shuffle(entries.begin(), entries.end(), rng);
    const Ranking r = rank_entries(entries);
    out.require(r.entries.front().node == n(10) && r.entries.front().lowest_prob == 0.4,
                "(a) node 10 with 0.4 ranks first");
  }
  const Ppdg model = fixture::chain_model();
  for (const auto& c : fixture::ranking_cases()) {
    const Ranking r = rank_cp(c.trace, model);
    bool same = r.entries.size() == c.ranking.size();
    for (std::size_t i = 0; same && i < r.entries.size(); ++i) {
      same = r.entries[i].node == n(c.ranking[i].node) && r.entries[i].lowest_prob == c.ranking[i].prob &&
             r.entries[i].trace_index == c.ranking[i].index &&
             r.entries[i].configuration() == c.ranking[i].configuration;
    }
    out.require(same, "(b) " + c.name);
  }
}

void sbi(Outcome& out) {
  struct Tally {
    std::uint64_t failed, passed, num, den;
  };
  // Expected fractions reduced by hand.
  const std::vector<Tally> tallies{
      {0, 0, 0, 1},    {1, 0, 1, 1},     {0, 1, 0, 1},     {1, 1, 1, 2},   {2, 2, 1, 2},    {3, 0, 1, 1},
      {0, 5, 0, 1},    {2, 6, 1, 4},     {6, 2, 3, 4},     {5, 5, 1, 2},   {7, 3, 7, 10},   {3, 7, 3, 10},
      {10, 0, 1, 1},   {1, 99, 1, 100},  {99, 1, 99, 100}, {12, 18, 2, 5}, {18, 12, 3, 5},  {4, 6, 2, 5},
      {50, 50, 1, 2},  {1000, 1, 1000, 1001}, {13, 17, 13, 30}, {0, 1000, 0, 1}, {17, 0, 1, 1}, {8, 24, 1, 4},
      {1, 2, 1, 3},    {2, 1, 2, 3}};
  // One statement per tally; run k covers statement s when k is below its tally.
  std::uint64_t max_f = 0;
  std::uint64_t max_p = 0;
  for (const auto& t : tallies) {
    max_f = std::max(max_f, t.failed);
    max_p = std::max(max_p, t.passed);
  }
  std::vector<ExecutionResult> results;
  for (std::uint64_t k = 0; k < max_f + max_p; ++k) {
    ExecutionResult r;
    const bool failing = k < max_f;
    const std::uint64_t rank = failing ? k : k - max_f;
    r.verdict = failing ? (k % 2 ? Verdict::Crash : Verdict::Fail) : Verdict::Pass;
    for (std::size_t s = 0; s < tallies.size(); ++s) {
      if (rank < (failing ? tallies[s].failed : tallies[s].passed)) r.covered.insert(StmtId{static_cast<int>(s) + 1});
    }
    results.push_back(std::move(r));
  }
  const SbiScores scores = sbi_scores(results, static_cast<int>(tallies.size()));
  for (std::size_t s = 0; s < tallies.size(); ++s) {
    const auto& t = tallies[s];
    const auto& e = scores.entries[s];
    const std::string tag = "(" + std::to_string(t.failed) + "," + std::to_string(t.passed) + ")";
    out.require(e.failed == t.failed && e.passed == t.passed, tag + " tallies");
    out.require(e.score == Rational{t.num, t.den}, tag + " score " + e.score.str());
    out.require(sbi_suspiciousness(t.failed, t.passed) == Rational{t.num, t.den}, tag + " formula");
  }
  out.detail << tallies.size() << " tallies";
}

void comparative(Outcome& out) {
  const ExperimentReport r = run_experiment(load_config(oracle::corpus_dir() / "experiment.toml"));
  const Aggregate& a = r.overall;
  out.require(a.errors == 0, std::to_string(a.errors) + " pipeline errors");
  out.require(a.killed >= 30, "only " + std::to_string(a.killed) + " KILLED mutants");
  out.require(a.ppdg_hits >= a.sbi_hits, "PPDG top-k hits below SBI");
  out.require(a.ppdg_mean_exam <= a.sbi_mean_exam, "PPDG mean exam above SBI");
  out.require(aggregates_consistent(r), "aggregates do not recompute");
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s%d KILLED of %d; top-%d PPDG %d vs SBI %d; mean exam PPDG %.4f vs SBI %.4f",
                out.ok ? "" : " | ", a.killed, a.mutants, r.top_k, a.ppdg_hits, a.sbi_hits, a.ppdg_mean_exam,
                a.sbi_mean_exam);
  out.detail << buf;
}

void hygiene(Outcome& out, const std::vector<oracle::CorpusProgram>& corpus) {
  constexpr std::uint64_t kBudget = 100000;
  std::size_t total = 0;
  std::map<MutantClass, int> classes;
  for (const auto& p : corpus) {
    const std::string base = unparse(p.ast);
    for (const Mutant& m : enumerate_mutants(p.ast, kAllOperators, p.name)) {
      ++total;
      const std::string text = unparse(m.mutated);
      Ast reparsed;
      try {
        reparsed = parse(text);
      } catch (const ParseError& e) {
        out.require(false, m.id + " does not reparse: " + e.what());
        continue;
      }
      out.require(reparsed == m.mutated, m.id + " reparses to a different AST");
      out.require(oracle::token_diff(base, text) == 1, m.id + " differs in other than one token");
      const Classification c = classify_mutant(m, p.suite, kBudget);
      const oracle::RerunClass o = oracle::rerun(p.ast, m, p.suite, kBudget);
      out.require(c.kind == o.kind && c.failing == o.failing, m.id + " classification disagrees with rerun");
      ++classes[c.kind];
    }
  }
  out.detail << (out.ok ? "" : " | ") << total << " mutants: " << classes[MutantClass::Killed] << " KILLED, "
             << classes[MutantClass::EquivalentOnSuite] << " EQUIVALENT_ON_SUITE, " << classes[MutantClass::NoPassing]
             << " NO_PASSING";
}

void dependence(Outcome& out, const std::vector<oracle::CorpusProgram>& corpus) {
  int checked = 0;
  for (const auto& p : corpus) {
    const Cfg cfg = build_cfg(p.ast);
    if (cfg.node_count() > 12) continue;
    ++checked;
    const PostDomTree pdt = compute_postdominators(cfg);
    const auto ipdom = oracle::immediate_postdominators(cfg);
    for (NodeId node : cfg.nodes()) {
      const auto it = ipdom.find(node);
      const auto got = pdt.ipdom(node);
      const bool same = it == ipdom.end() ? !got.has_value() : (got.has_value() && *got == it->second);
      out.require(same, p.name + ": ipdom(" + node_name(node) + ")");
    }
    std::set<oracle::CdTriple> cds;
    for (const auto& d : control_dependences(cfg, pdt)) cds.emplace(d.controller, d.dependent, d.label);
    out.require(cds == oracle::control_dependences(cfg), p.name + ": control dependences");
    std::set<oracle::DuTriple> dus;
    for (const auto& d : reaching_definitions(cfg)) dus.emplace(d.def, d.use, d.variable);
    const auto two = oracle::reaching_pairs(cfg, 2);
    out.require(two == oracle::reaching_pairs(cfg, 3), p.name + ": walk oracle not saturated at 2 unrollings");
    out.require(dus == two, p.name + ": reaching definitions");
  }
  out.require(checked > 0, "no corpus CFG small enough");
  out.detail << (out.ok ? "" : " | ") << checked << " CFGs with at most 12 nodes";
}

}  // namespace

int main() {
  const auto corpus = oracle::load_corpus();
  bool ok = true;
  ok &= criterion(1, "worked-example structure", 1.0, worked_example);
  ok &= criterion(2, "learning correctness", 10.0, [&](Outcome& o) { learning(o, corpus); });
  ok &= criterion(3, "RankCP ordering", 1.0, ranking);
  ok &= criterion(4, "SBI formula", 1.0, sbi);
  ok &= criterion(5, "comparative trend", 120.0, comparative);
  ok &= criterion(6, "mutation hygiene", 30.0, [&](Outcome& o) { hygiene(o, corpus); });
  ok &= criterion(7, "dependence oracles", 60.0, [&](Outcome& o) { dependence(o, corpus); });
  return ok ? 0 : 1;
}
