#pragma once

// Node-state traces and their JSON-Lines form:
//
//   {"test":"t3","verdict":"FAIL"}
//   {"node":1,"state":"POS"}
//   {"node":2,"state":"TRUE"}
//   ...
//
// A header line starts a new trace, so one file may hold several.

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppdg/cfg.hpp"

namespace ppdg {

enum class Verdict { Pass, Fail, Crash };

constexpr std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Crash: return "CRASH";
  }
  return "?";
}

inline Verdict parse_verdict(std::string_view s) {
  if (s == "PASS") return Verdict::Pass;
  if (s == "FAIL") return Verdict::Fail;
  if (s == "CRASH") return Verdict::Crash;
  throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

/// CRASH counts as failing everywhere.
constexpr bool is_failing(Verdict v) { return v != Verdict::Pass; }

struct TraceEvent {
  NodeId node;
  std::string state;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct NodeStateTrace {
  std::string test_id;
  Verdict verdict = Verdict::Pass;
  std::vector<TraceEvent> events;
  friend bool operator==(const NodeStateTrace&, const NodeStateTrace&) = default;
};

class TraceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void write_jsonl(std::ostream& os, const NodeStateTrace& trace) {
  os << nlohmann::json{{"test", trace.test_id}, {"verdict", std::string(verdict_name(trace.verdict))}}.dump()
     << '\n';
  for (const TraceEvent& e : trace.events) {
    os << nlohmann::json{{"node", e.node.value}, {"state", e.state}}.dump() << '\n';
  }
}

inline std::string to_jsonl(const NodeStateTrace& trace) {
  std::ostringstream os;
  write_jsonl(os, trace);
  return os.str();
}

inline std::vector<NodeStateTrace> read_jsonl(std::istream& is) {
  std::vector<NodeStateTrace> traces;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw TraceError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
    if (j.contains("test")) {
      NodeStateTrace t;
      t.test_id = j.at("test").get<std::string>();
      t.verdict = parse_verdict(j.value("verdict", std::string("PASS")));
      traces.push_back(std::move(t));
      continue;
    }
    if (traces.empty()) throw TraceError("trace line " + std::to_string(line_no) + ": event before header");
    if (!j.contains("node") || !j.contains("state")) {
      throw TraceError("trace line " + std::to_string(line_no) + ": expected {node, state}");
    }
    traces.back().events.push_back(TraceEvent{NodeId{j.at("node").get<int>()}, j.at("state").get<std::string>()});
  }
  return traces;
}

inline std::vector<NodeStateTrace> from_jsonl(const std::string& text) {
  std::istringstream is(text);
  return read_jsonl(is);
}

}  // namespace ppdg
