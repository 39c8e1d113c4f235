#pragma once

// Mutation experiment: for every program, seed single-site faults, classify
// each mutant against the program's golden suite, and for killed mutants
// compare the faulty statement's rank under RankCP and SBI.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "ppdg/interpreter.hpp"
#include "ppdg/localizer.hpp"
#include "ppdg/model.hpp"
#include "ppdg/mutation.hpp"
#include "ppdg/parser.hpp"
#include "ppdg/pdg.hpp"
#include "ppdg/transform.hpp"

namespace ppdg {

struct ExperimentConfig {
  std::vector<std::filesystem::path> programs;
  std::vector<std::filesystem::path> suites;  // one per program
  std::vector<MutationOperator> operators{std::begin(kAllOperators), std::end(kAllOperators)};
  int top_k = 5;
  Smoothing smoothing = Smoothing::Off;
  std::uint64_t step_budget = kDefaultStepBudget;
  std::uint64_t seed = 0;  // reserved; every stage is deterministic
  unsigned threads = 0;    // 0 = hardware concurrency

  void validate() const {
    if (programs.size() != suites.size()) {
      throw std::invalid_argument("config lists " + std::to_string(programs.size()) + " programs but " +
                                  std::to_string(suites.size()) + " suites");
    }
    if (top_k < 1) throw std::invalid_argument("topK must be at least 1");
    if (step_budget == 0) throw std::invalid_argument("stepBudget must be positive");
  }
};

namespace detail {

template <class Get>
ExperimentConfig config_from_fields(const std::filesystem::path& base, Get&& get) {
  ExperimentConfig cfg;
  for (const std::string& p : get.strings("programs")) cfg.programs.push_back(base / p);
  for (const std::string& s : get.strings("suites")) cfg.suites.push_back(base / s);
  if (auto ops = get.optional_strings("operators")) {
    cfg.operators.clear();
    std::set<MutationOperator> unique;
    for (const std::string& o : *ops) unique.insert(parse_operator(o));
    cfg.operators.assign(unique.begin(), unique.end());
  }
  if (auto k = get.integer("topK")) cfg.top_k = static_cast<int>(*k);
  if (auto s = get.string("smoothing")) cfg.smoothing = parse_smoothing(*s);
  if (auto b = get.integer("stepBudget")) {
    if (*b <= 0) throw std::invalid_argument("stepBudget must be positive");
    cfg.step_budget = static_cast<std::uint64_t>(*b);
  }
  if (auto s = get.integer("seed")) cfg.seed = static_cast<std::uint64_t>(*s);
  if (auto t = get.integer("threads")) cfg.threads = static_cast<unsigned>(*t);
  cfg.validate();
  return cfg;
}

struct JsonFields {
  const nlohmann::json& j;
  std::vector<std::string> strings(const char* key) const { return j.at(key).get<std::vector<std::string>>(); }
  std::optional<std::vector<std::string>> optional_strings(const char* key) const {
    if (!j.contains(key)) return std::nullopt;
    return j.at(key).get<std::vector<std::string>>();
  }
  std::optional<std::int64_t> integer(const char* key) const {
    if (!j.contains(key)) return std::nullopt;
    return j.at(key).get<std::int64_t>();
  }
  std::optional<std::string> string(const char* key) const {
    if (!j.contains(key)) return std::nullopt;
    return j.at(key).get<std::string>();
  }
};

struct TomlFields {
  const toml::table& t;
  std::optional<std::vector<std::string>> optional_strings(const char* key) const {
    const toml::array* arr = t[key].as_array();
    if (!arr) {
      if (t.contains(key)) throw std::invalid_argument(std::string(key) + " must be an array of strings");
      return std::nullopt;
    }
    std::vector<std::string> out;
    for (const auto& v : *arr) {
      auto s = v.value<std::string>();
      if (!s) throw std::invalid_argument(std::string(key) + " must be an array of strings");
      out.push_back(*s);
    }
    return out;
  }
  std::vector<std::string> strings(const char* key) const {
    auto v = optional_strings(key);
    if (!v) throw std::invalid_argument(std::string("missing key '") + key + "'");
    return *v;
  }
  std::optional<std::int64_t> integer(const char* key) const { return t[key].value<std::int64_t>(); }
  std::optional<std::string> string(const char* key) const { return t[key].value<std::string>(); }
};

}  // namespace detail

/// Reads a .json or .toml experiment config. Program and suite paths are
/// resolved relative to the config file's directory.
inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  const std::filesystem::path base = path.parent_path();
  if (path.extension() == ".toml") {
    try {
      const toml::table t = toml::parse(in, path.string());
      return detail::config_from_fields(base, detail::TomlFields{t});
    } catch (const toml::parse_error& e) {
      throw std::runtime_error("config " + path.string() + ": " + std::string(e.description()));
    }
  }
  const nlohmann::json j = nlohmann::json::parse(in);
  return detail::config_from_fields(base, detail::JsonFields{j});
}

// ---------------------------------------------------------------------------
// Report

struct MutantRow {
  std::string program;
  std::string mutant_id;
  std::string op;
  int stmt = 0;
  int position = 0;
  std::string original;
  std::string replacement;
  int statements = 0;
  MutantClass kind = MutantClass::EquivalentOnSuite;
  int pass_count = 0;
  int fail_count = 0;
  int crash_count = 0;
  std::optional<int> ppdg_rank;  // set for KILLED rows
  std::optional<int> sbi_rank;
  std::optional<Rational> ppdg_exam;
  std::optional<Rational> sbi_exam;
  bool ppdg_hit = false;
  bool sbi_hit = false;
  std::string error;  // non-empty when the pipeline failed for this mutant

  friend bool operator==(const MutantRow&, const MutantRow&) = default;
};

struct Aggregate {
  std::string scope;  // program name or "ALL"
  int mutants = 0;
  int killed = 0;
  int equivalent = 0;
  int no_passing = 0;
  int errors = 0;
  int ppdg_hits = 0;
  int sbi_hits = 0;
  double ppdg_mean_exam = 0.0;
  double sbi_mean_exam = 0.0;

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct ExperimentReport {
  int top_k = 5;
  std::vector<MutantRow> rows;         // sorted by (program, mutant id)
  std::vector<Aggregate> per_program;  // sorted by program
  Aggregate overall;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

inline Aggregate aggregate_rows(const std::string& scope, const std::vector<const MutantRow*>& rows) {
  Aggregate a;
  a.scope = scope;
  double ppdg_sum = 0.0;
  double sbi_sum = 0.0;
  int ranked = 0;
  for (const MutantRow* r : rows) {
    ++a.mutants;
    if (!r->error.empty()) {
      ++a.errors;
      continue;
    }
    switch (r->kind) {
      case MutantClass::Killed: ++a.killed; break;
      case MutantClass::EquivalentOnSuite: ++a.equivalent; break;
      case MutantClass::NoPassing: ++a.no_passing; break;
    }
    if (r->kind != MutantClass::Killed || !r->ppdg_exam || !r->sbi_exam) continue;
    ++ranked;
    a.ppdg_hits += r->ppdg_hit;
    a.sbi_hits += r->sbi_hit;
    ppdg_sum += r->ppdg_exam->value();
    sbi_sum += r->sbi_exam->value();
  }
  if (ranked) {
    a.ppdg_mean_exam = ppdg_sum / ranked;
    a.sbi_mean_exam = sbi_sum / ranked;
  }
  return a;
}

/// Fills per_program and overall from rows.
inline void compute_aggregates(ExperimentReport& report) {
  std::map<std::string, std::vector<const MutantRow*>> by_program;
  std::vector<const MutantRow*> all;
  for (const MutantRow& r : report.rows) {
    by_program[r.program].push_back(&r);
    all.push_back(&r);
  }
  report.per_program.clear();
  for (const auto& [program, rows] : by_program) report.per_program.push_back(aggregate_rows(program, rows));
  report.overall = aggregate_rows("ALL", all);
}

/// True when the stored aggregates equal a recomputation from the rows.
inline bool aggregates_consistent(const ExperimentReport& report) {
  ExperimentReport recomputed = report;
  compute_aggregates(recomputed);
  return recomputed.per_program == report.per_program && recomputed.overall == report.overall;
}

// ---------------------------------------------------------------------------
// Pipeline

struct LocalizationOutcome {
  RankMetrics ppdg;
  RankMetrics sbi;
  Ranking best_ranking;  // RankCP ranking of the failing trace with the best rank
  SbiScores sbi_scores;
};

/// Trains on the passing runs, ranks every failing run with RankCP and keeps
/// the best rank; SBI uses the whole suite.
inline LocalizationOutcome localize_mutant(const Mutant& mutant, const Classification& classification,
                                           Smoothing smoothing) {
  const Ast& ast = mutant.mutated;
  const TransformedPdg tpdg = transform_pdg(build_pdg(ast));
  Ppdg skeleton = assign_state_spaces(tpdg, ast);
  skeleton.set_smoothing(smoothing);

  std::vector<NodeStateTrace> passing;
  for (const ExecutionResult& r : classification.results) {
    if (!is_failing(r.verdict)) passing.push_back(r.trace);
  }
  const Ppdg model = learn_params(passing, skeleton);

  LocalizationOutcome out;
  const int n = ast.statement_count;
  out.ppdg.rank = n + 2;
  for (const ExecutionResult& r : classification.results) {
    if (!is_failing(r.verdict)) continue;
    Ranking ranking = rank_cp(r.trace, model);
    const RankMetrics m = rank_metrics(ranking, mutant.faulty_stmt(), n);
    if (m.rank < out.ppdg.rank) {
      out.ppdg = m;
      out.best_ranking = std::move(ranking);
    }
  }
  out.sbi_scores = sbi_scores(classification.results, n);
  out.sbi = rank_metrics(out.sbi_scores, mutant.faulty_stmt(), n);
  return out;
}

inline MutantRow evaluate_mutant(const std::string& program, const Mutant& mutant, const TestSuite& golden_suite,
                                 int top_k, Smoothing smoothing, std::uint64_t step_budget) {
  MutantRow row;
  row.program = program;
  row.mutant_id = mutant.id;
  row.op = std::string(operator_name(mutant.op));
  row.stmt = mutant.site.stmt.value;
  row.position = mutant.site.position;
  row.original = mutant.original;
  row.replacement = mutant.replacement;
  row.statements = mutant.mutated.statement_count;
  try {
    const Classification c = classify_mutant(mutant, golden_suite, step_budget);
    row.kind = c.kind;
    for (const ExecutionResult& r : c.results) {
      switch (r.verdict) {
        case Verdict::Pass: ++row.pass_count; break;
        case Verdict::Fail: ++row.fail_count; break;
        case Verdict::Crash: ++row.crash_count; break;
      }
    }
    if (c.kind == MutantClass::Killed) {
      const LocalizationOutcome loc = localize_mutant(mutant, c, smoothing);
      row.ppdg_rank = loc.ppdg.rank;
      row.ppdg_exam = loc.ppdg.exam;
      row.sbi_rank = loc.sbi.rank;
      row.sbi_exam = loc.sbi.exam;
      row.ppdg_hit = loc.ppdg.rank <= top_k;
      row.sbi_hit = loc.sbi.rank <= top_k;
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs fn(i) for i in [0, n) on `threads` workers.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace detail

struct ProgramUnderTest {
  std::string name;
  Ast ast;
  TestSuite suite;
};

/// Loads a program and its suite and checks that the unmutated program
/// passes every case.
inline ProgramUnderTest load_program(const std::filesystem::path& program, const std::filesystem::path& suite,
                                     std::uint64_t step_budget) {
  ProgramUnderTest p;
  p.name = program.stem().string();
  const std::string text = detail::read_file(program);
  try {
    p.ast = parse(SourceProgram{p.name, text});
  } catch (const ParseError& e) {
    throw std::runtime_error(program.string() + ":" + e.what());
  }
  p.suite = suite_from_json(nlohmann::json::parse(detail::read_file(suite)));
  const TransformedPdg tpdg = transform_pdg(build_pdg(p.ast));
  for (const ExecutionResult& r : run_suite(p.ast, tpdg, p.suite, step_budget)) {
    if (r.verdict != Verdict::Pass) {
      throw std::runtime_error("sanity gate: unmutated " + p.name + " does not pass test '" + r.test_id + "' (" +
                               std::string(verdict_name(r.verdict)) + ")");
    }
  }
  return p;
}

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<ProgramUnderTest> programs;
  std::set<std::string> names;
  for (std::size_t i = 0; i < config.programs.size(); ++i) {
    programs.push_back(load_program(config.programs[i], config.suites[i], config.step_budget));
    if (!names.insert(programs.back().name).second) {
      throw std::invalid_argument("two programs share the name '" + programs.back().name + "'");
    }
  }

  struct Job {
    const ProgramUnderTest* program;
    Mutant mutant;
  };
  std::vector<Job> jobs;
  for (const ProgramUnderTest& p : programs) {
    for (Mutant& m : enumerate_mutants(p.ast, config.operators, p.name)) jobs.push_back(Job{&p, std::move(m)});
  }

  ExperimentReport report;
  report.top_k = config.top_k;
  report.rows.resize(jobs.size());
  detail::parallel_for(jobs.size(), config.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    report.rows[i] = evaluate_mutant(job.program->name, job.mutant, job.program->suite, config.top_k,
                                     config.smoothing, config.step_budget);
  });
  std::sort(report.rows.begin(), report.rows.end(), [](const MutantRow& a, const MutantRow& b) {
    return std::tie(a.program, a.mutant_id) < std::tie(b.program, b.mutant_id);
  });
  compute_aggregates(report);
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const Aggregate& a) {
  return {{"scope", a.scope},           {"mutants", a.mutants},
          {"killed", a.killed},         {"equivalentOnSuite", a.equivalent},
          {"noPassing", a.no_passing},  {"errors", a.errors},
          {"ppdgTopK", a.ppdg_hits},    {"sbiTopK", a.sbi_hits},
          {"ppdgMeanExam", a.ppdg_mean_exam}, {"sbiMeanExam", a.sbi_mean_exam}};
}

inline Aggregate aggregate_from_json(const nlohmann::json& j) {
  Aggregate a;
  a.scope = j.at("scope").get<std::string>();
  a.mutants = j.at("mutants").get<int>();
  a.killed = j.at("killed").get<int>();
  a.equivalent = j.at("equivalentOnSuite").get<int>();
  a.no_passing = j.at("noPassing").get<int>();
  a.errors = j.at("errors").get<int>();
  a.ppdg_hits = j.at("ppdgTopK").get<int>();
  a.sbi_hits = j.at("sbiTopK").get<int>();
  a.ppdg_mean_exam = j.at("ppdgMeanExam").get<double>();
  a.sbi_mean_exam = j.at("sbiMeanExam").get<double>();
  return a;
}

inline nlohmann::json to_json(const MutantRow& r) {
  nlohmann::json j{{"program", r.program},
                   {"mutant", r.mutant_id},
                   {"operator", r.op},
                   {"stmt", r.stmt},
                   {"position", r.position},
                   {"original", r.original},
                   {"replacement", r.replacement},
                   {"statements", r.statements},
                   {"classification", std::string(mutant_class_name(r.kind))},
                   {"pass", r.pass_count},
                   {"fail", r.fail_count},
                   {"crash", r.crash_count},
                   {"ppdgTopK", r.ppdg_hit},
                   {"sbiTopK", r.sbi_hit}};
  auto opt_rank = [](const std::optional<int>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  auto opt_exam = [](const std::optional<Rational>& v) {
    return v ? nlohmann::json{{"num", v->num}, {"den", v->den}} : nlohmann::json(nullptr);
  };
  j["ppdgRank"] = opt_rank(r.ppdg_rank);
  j["sbiRank"] = opt_rank(r.sbi_rank);
  j["ppdgExam"] = opt_exam(r.ppdg_exam);
  j["sbiExam"] = opt_exam(r.sbi_exam);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline MutantRow mutant_row_from_json(const nlohmann::json& j) {
  MutantRow r;
  r.program = j.at("program").get<std::string>();
  r.mutant_id = j.at("mutant").get<std::string>();
  r.op = j.at("operator").get<std::string>();
  r.stmt = j.at("stmt").get<int>();
  r.position = j.at("position").get<int>();
  r.original = j.at("original").get<std::string>();
  r.replacement = j.at("replacement").get<std::string>();
  r.statements = j.at("statements").get<int>();
  const std::string kind = j.at("classification").get<std::string>();
  if (kind == "KILLED") {
    r.kind = MutantClass::Killed;
  } else if (kind == "EQUIVALENT_ON_SUITE") {
    r.kind = MutantClass::EquivalentOnSuite;
  } else if (kind == "NO_PASSING") {
    r.kind = MutantClass::NoPassing;
  } else {
    throw std::invalid_argument("unknown classification '" + kind + "'");
  }
  r.pass_count = j.at("pass").get<int>();
  r.fail_count = j.at("fail").get<int>();
  r.crash_count = j.at("crash").get<int>();
  r.ppdg_hit = j.at("ppdgTopK").get<bool>();
  r.sbi_hit = j.at("sbiTopK").get<bool>();
  if (!j.at("ppdgRank").is_null()) r.ppdg_rank = j.at("ppdgRank").get<int>();
  if (!j.at("sbiRank").is_null()) r.sbi_rank = j.at("sbiRank").get<int>();
  auto exam = [](const nlohmann::json& e) -> std::optional<Rational> {
    if (e.is_null()) return std::nullopt;
    return Rational{e.at("num").get<std::uint64_t>(), e.at("den").get<std::uint64_t>()};
  };
  r.ppdg_exam = exam(j.at("ppdgExam"));
  r.sbi_exam = exam(j.at("sbiExam"));
  r.error = j.value("error", std::string());
  return r;
}

inline nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["topK"] = report.top_k;
  j["rows"] = nlohmann::json::array();
  for (const MutantRow& r : report.rows) j["rows"].push_back(to_json(r));
  j["programs"] = nlohmann::json::array();
  for (const Aggregate& a : report.per_program) j["programs"].push_back(to_json(a));
  j["overall"] = to_json(report.overall);
  return j;
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport report;
  report.top_k = j.at("topK").get<int>();
  for (const auto& r : j.at("rows")) report.rows.push_back(mutant_row_from_json(r));
  for (const auto& a : j.at("programs")) report.per_program.push_back(aggregate_from_json(a));
  report.overall = aggregate_from_json(j.at("overall"));
  return report;
}

/// Summary table, one line per program plus the overall line.
inline std::string summary_csv(const ExperimentReport& report) {
  std::string out =
      "scope,mutants,killed,equivalent_on_suite,no_passing,errors,ppdg_top" + std::to_string(report.top_k) +
      ",sbi_top" + std::to_string(report.top_k) + ",ppdg_mean_exam,sbi_mean_exam\n";
  auto line = [&](const Aggregate& a) {
    out += a.scope + "," + std::to_string(a.mutants) + "," + std::to_string(a.killed) + "," +
           std::to_string(a.equivalent) + "," + std::to_string(a.no_passing) + "," + std::to_string(a.errors) +
           "," + std::to_string(a.ppdg_hits) + "," + std::to_string(a.sbi_hits) + "," +
           detail::format_prob(a.ppdg_mean_exam) + "," + detail::format_prob(a.sbi_mean_exam) + "\n";
  };
  for (const Aggregate& a : report.per_program) line(a);
  line(report.overall);
  return out;
}

}  // namespace ppdg
