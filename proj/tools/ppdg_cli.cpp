// ppdg: command-line front end for the PPDG fault-localization toolkit.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppdg/ppdg.hpp"

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "-" writes to stdout.
void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

ppdg::Ast load_ast(const fs::path& file) {
  try {
    return ppdg::parse(ppdg::SourceProgram{file.stem().string(), read_text(file)});
  } catch (const ppdg::ParseError& e) {
    throw std::runtime_error(file.string() + ":" + e.what());
  }
}

ppdg::TestSuite load_suite(const fs::path& file) {
  return ppdg::suite_from_json(nlohmann::json::parse(read_text(file)));
}

void check_format(const std::string& format) {
  if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
}

int cmd_parse(const fs::path& file) {
  const ppdg::Ast ast = load_ast(file);
  std::cout << std::left << std::setw(4) << "id" << std::setw(8) << "kind" << std::setw(6) << "pred"
            << std::setw(20) << "uses" << "defines\n";
  for (const ppdg::StatementInfo& s : ppdg::list_statements(ast)) {
    std::string uses;
    for (const std::string& v : s.used) uses += (uses.empty() ? "" : ",") + v;
    std::cout << std::setw(4) << s.id.value << std::setw(8) << ppdg::kind_name(s.kind) << std::setw(6)
              << (s.predicate ? "yes" : "no") << std::setw(20) << (uses.empty() ? "-" : uses)
              << s.defined.value_or("-") << "\n";
  }
  return 0;
}

int cmd_graph(const std::string& which, const fs::path& file, const std::string& dot_out,
              const std::string& json_out) {
  const ppdg::Ast ast = load_ast(file);
  const ppdg::Cfg cfg = ppdg::build_cfg(ast);
  if (which == "cfg") {
    write_text(dot_out, ppdg::export_dot(cfg));
    return 0;
  }
  const ppdg::Pdg pdg = ppdg::build_pdg(ast);
  if (which == "pdg") {
    write_text(dot_out, ppdg::export_dot(pdg));
    if (!json_out.empty()) write_text(json_out, ppdg::to_json(pdg).dump(2) + "\n");
    return 0;
  }
  const ppdg::TransformedPdg tpdg = ppdg::transform_pdg(pdg);
  write_text(dot_out, ppdg::export_dot(tpdg));
  if (!json_out.empty()) write_text(json_out, ppdg::to_json(tpdg).dump(2) + "\n");
  return 0;
}

int cmd_train(const fs::path& file, const fs::path& suite_file, const std::string& out,
              const std::string& smoothing, std::uint64_t budget, const std::string& traces_out) {
  const ppdg::Ast ast = load_ast(file);
  const ppdg::TestSuite suite = load_suite(suite_file);
  const ppdg::TransformedPdg tpdg = ppdg::transform_pdg(ppdg::build_pdg(ast));
  const auto results = ppdg::run_suite(ast, tpdg, suite, budget);

  std::vector<ppdg::NodeStateTrace> passing;
  std::string all_traces;
  for (const auto& r : results) {
    if (r.verdict == ppdg::Verdict::Pass) passing.push_back(r.trace);
    all_traces += ppdg::to_jsonl(r.trace);
  }
  if (!traces_out.empty()) write_text(traces_out, all_traces);
  if (passing.empty()) {
    throw std::runtime_error("no passing executions in " + suite_file.string() +
                             ": the PPDG is learned from passing executions only");
  }
  ppdg::Ppdg skeleton = ppdg::assign_state_spaces(tpdg, ast);
  skeleton.set_smoothing(ppdg::parse_smoothing(smoothing));
  const ppdg::Ppdg model = ppdg::learn_params(passing, skeleton);
  write_text(out, ppdg::to_json(model).dump(2) + "\n");
  std::cerr << "trained on " << passing.size() << " of " << results.size() << " executions\n";
  return 0;
}

int cmd_trace(const fs::path& file, const fs::path& suite_file, const std::string& out, std::uint64_t budget) {
  const ppdg::Ast ast = load_ast(file);
  const ppdg::TransformedPdg tpdg = ppdg::transform_pdg(ppdg::build_pdg(ast));
  std::string text;
  for (const auto& r : ppdg::run_suite(ast, tpdg, load_suite(suite_file), budget)) {
    text += ppdg::to_jsonl(r.trace);
    std::cerr << r.test_id << ": " << ppdg::verdict_name(r.verdict) << (r.fault.empty() ? "" : " (" + r.fault + ")")
              << "\n";
  }
  write_text(out, text);
  return 0;
}

int cmd_localize(const fs::path& model_file, const fs::path& trace_file, const std::string& test_id,
                 const std::string& format, const std::string& out) {
  check_format(format);
  const ppdg::Ppdg model = ppdg::ppdg_from_json(nlohmann::json::parse(read_text(model_file)));
  std::ifstream in(trace_file);
  if (!in) throw std::runtime_error("cannot open " + trace_file.string());
  const auto traces = ppdg::read_jsonl(in);

  const ppdg::NodeStateTrace* chosen = nullptr;
  for (const auto& t : traces) {
    if (test_id.empty() ? ppdg::is_failing(t.verdict) : t.test_id == test_id) {
      chosen = &t;
      break;
    }
  }
  if (!chosen) {
    throw std::runtime_error(test_id.empty() ? "no failing trace in " + trace_file.string()
                                             : "no trace for test '" + test_id + "'");
  }
  if (!ppdg::is_failing(chosen->verdict)) {
    std::cerr << "warning: trace '" << chosen->test_id << "' is from a passing execution\n";
  }
  const ppdg::Ranking ranking = ppdg::rank_cp(*chosen, model);
  write_text(out, format == "csv" ? ppdg::to_csv(ranking) : ppdg::to_json(ranking).dump(2) + "\n");
  return 0;
}

int cmd_sbi(const fs::path& file, const fs::path& suite_file, const std::string& format, const std::string& out,
            std::uint64_t budget) {
  check_format(format);
  const ppdg::Ast ast = load_ast(file);
  const ppdg::TransformedPdg tpdg = ppdg::transform_pdg(ppdg::build_pdg(ast));
  const auto results = ppdg::run_suite(ast, tpdg, load_suite(suite_file), budget);
  const ppdg::SbiScores scores = ppdg::sbi_scores(results, ast.statement_count);
  write_text(out, format == "csv" ? ppdg::to_csv(scores) : ppdg::to_json(scores).dump(2) + "\n");
  return 0;
}

int cmd_mutate(const fs::path& file, const std::string& ops, const fs::path& out_dir,
               const std::string& suite_file, std::uint64_t budget) {
  const ppdg::Ast ast = load_ast(file);
  const auto operators = ppdg::parse_operator_list(ops);
  if (operators.empty()) throw UsageError("--ops selects no operators");
  const auto mutants = ppdg::enumerate_mutants(ast, operators, file.stem().string());
  std::optional<ppdg::TestSuite> suite;
  if (!suite_file.empty()) suite = load_suite(suite_file);

  fs::create_directories(out_dir);
  nlohmann::json index = nlohmann::json::array();
  for (const ppdg::Mutant& m : mutants) {
    nlohmann::json manifest = ppdg::to_json(m);
    if (suite) {
      const ppdg::Classification c = ppdg::classify_mutant(m, *suite, budget);
      manifest["classification"] = std::string(ppdg::mutant_class_name(c.kind));
      manifest["failingTests"] = c.failing;
    }
    write_text((out_dir / (m.id + ".json")).string(), manifest.dump(2) + "\n");
    index.push_back(m.id);
  }
  write_text((out_dir / "index.json").string(), index.dump(2) + "\n");
  std::cout << mutants.size() << " mutants written to " << out_dir.string() << "\n";
  return 0;
}

int cmd_golden(const fs::path& file, const fs::path& suite_file, const std::string& out, std::uint64_t budget) {
  const ppdg::Ast ast = load_ast(file);
  const ppdg::TransformedPdg tpdg = ppdg::transform_pdg(ppdg::build_pdg(ast));
  ppdg::TestSuite suite = ppdg::with_golden_outputs(ast, tpdg, load_suite(suite_file), budget);
  if (suite.program.empty()) suite.program = file.filename().string();
  write_text(out, ppdg::to_json(suite).dump(2) + "\n");
  return 0;
}

int cmd_experiment(const fs::path& config_file, const std::string& out_override) {
  const ppdg::ExperimentConfig config = ppdg::load_config(config_file);
  const fs::path out_dir = out_override.empty() ? config_file.parent_path() / "results" : fs::path(out_override);
  const ppdg::ExperimentReport report = ppdg::run_experiment(config);
  if (!ppdg::aggregates_consistent(report)) throw std::logic_error("report aggregates do not recompute from rows");
  const std::string summary = ppdg::summary_csv(report);
  write_text((out_dir / "summary.csv").string(), summary);
  write_text((out_dir / "report.json").string(), ppdg::to_json(report).dump(2) + "\n");
  std::cout << summary;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic program dependence graph fault localization for MiniLang"};
  app.require_subcommand(1);

  std::string file;
  std::string dot_out = "-";
  std::string json_out;
  std::string suite;
  std::string out;
  std::string smoothing = "off";
  std::string traces_out;
  std::string trace_file;
  std::string test_id;
  std::string format = "csv";
  std::string ops = "AOR,ROR,LOR,CRP,VRP";
  std::string config;
  std::uint64_t budget = ppdg::kDefaultStepBudget;

  auto* parse_cmd = app.add_subcommand("parse", "Syntax-check a program and print its statement table");
  parse_cmd->add_option("file", file, "MiniLang source (.mini)")->required();

  std::map<std::string, CLI::App*> graph_cmds;
  for (const char* which : {"cfg", "pdg", "ppdg"}) {
    auto* c = app.add_subcommand(which, std::string("Build the ") + which + " and export it as DOT");
    c->add_option("file", file, "MiniLang source (.mini)")->required();
    c->add_option("--dot", dot_out, "DOT output path ('-' for stdout)");
    if (std::string(which) != "cfg") c->add_option("--json", json_out, "Also write the graph as JSON");
    graph_cmds[which] = c;
  }

  auto* train_cmd = app.add_subcommand("train", "Learn a PPDG from the suite's passing executions");
  train_cmd->add_option("file", file, "MiniLang source (.mini)")->required();
  train_cmd->add_option("--suite", suite, "Test suite JSON")->required();
  train_cmd->add_option("--out", out, "PPDG JSON output")->required();
  train_cmd->add_option("--smoothing", smoothing, "off | laplace");
  train_cmd->add_option("--traces", traces_out, "Also write every execution's trace (JSON-Lines)");
  train_cmd->add_option("--budget", budget, "Interpreter step budget per test");

  auto* trace_cmd = app.add_subcommand("trace", "Run a suite and write node-state traces as JSON-Lines");
  trace_cmd->add_option("file", file, "MiniLang source (.mini)")->required();
  trace_cmd->add_option("--suite", suite, "Test suite JSON")->required();
  trace_cmd->add_option("--out", out, "Trace output ('-' for stdout)")->required();
  trace_cmd->add_option("--budget", budget, "Interpreter step budget per test");

  auto* localize_cmd = app.add_subcommand("localize", "Rank suspicious nodes of a failing trace (RankCP)");
  localize_cmd->add_option("model", file, "PPDG JSON from 'train'")->required();
  localize_cmd->add_option("--trace", trace_file, "Trace JSON-Lines")->required();
  localize_cmd->add_option("--test", test_id, "Trace to rank (default: first failing trace)");
  localize_cmd->add_option("--format", format, "csv | json");
  localize_cmd->add_option("--out", out, "Output path (default stdout)");

  auto* sbi_cmd = app.add_subcommand("sbi", "Score statements with SBI over a suite");
  sbi_cmd->add_option("file", file, "MiniLang source (.mini)")->required();
  sbi_cmd->add_option("--suite", suite, "Test suite JSON")->required();
  sbi_cmd->add_option("--format", format, "csv | json");
  sbi_cmd->add_option("--out", out, "Output path (default stdout)");
  sbi_cmd->add_option("--budget", budget, "Interpreter step budget per test");

  auto* mutate_cmd = app.add_subcommand("mutate", "Write single-site mutant manifests");
  mutate_cmd->add_option("file", file, "MiniLang source (.mini)")->required();
  mutate_cmd->add_option("--ops", ops, "Comma-separated operators: AOR,ROR,LOR,CRP,VRP");
  mutate_cmd->add_option("--out", out, "Output directory")->required();
  mutate_cmd->add_option("--suite", suite, "Classify each mutant against this golden suite");
  mutate_cmd->add_option("--budget", budget, "Interpreter step budget per test");

  auto* golden_cmd = app.add_subcommand("golden", "Fill a suite's expected outputs from the program itself");
  golden_cmd->add_option("file", file, "MiniLang source (.mini)")->required();
  golden_cmd->add_option("--suite", suite, "Test suite JSON (expected outputs ignored)")->required();
  golden_cmd->add_option("--out", out, "Output suite JSON ('-' for stdout)")->required();
  golden_cmd->add_option("--budget", budget, "Interpreter step budget per test");

  auto* experiment_cmd = app.add_subcommand("experiment", "Run the SBI vs PPDG mutation experiment");
  experiment_cmd->add_option("--config", config, "Experiment config (.toml or .json)")->required();
  experiment_cmd->add_option("--out", out, "Output directory (default: <config dir>/results)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every other parse failure is a usage error.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (out.empty() && (localize_cmd->parsed() || sbi_cmd->parsed())) out = "-";
    if (parse_cmd->parsed()) return cmd_parse(file);
    for (const auto& [which, cmd] : graph_cmds) {
      if (cmd->parsed()) return cmd_graph(which, file, dot_out, json_out);
    }
    if (train_cmd->parsed()) return cmd_train(file, suite, out, smoothing, budget, traces_out);
    if (trace_cmd->parsed()) return cmd_trace(file, suite, out, budget);
    if (localize_cmd->parsed()) return cmd_localize(file, trace_file, test_id, format, out);
    if (sbi_cmd->parsed()) return cmd_sbi(file, suite, format, out, budget);
    if (mutate_cmd->parsed()) return cmd_mutate(file, ops, out, suite, budget);
    if (golden_cmd->parsed()) return cmd_golden(file, suite, out, budget);
    if (experiment_cmd->parsed()) return cmd_experiment(config, out);
  } catch (const UsageError& e) {
    std::cerr << "ppdg: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ppdg: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
