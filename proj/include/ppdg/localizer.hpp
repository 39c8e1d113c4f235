#pragma once

// Suspicious-statement ranking: RankCP over one failing node-state trace, and
// the SBI statement score failed(s) / (passed(s) + failed(s)) as baseline.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppdg/interpreter.hpp"
#include "ppdg/model.hpp"
#include "ppdg/trace.hpp"

namespace ppdg {

/// Non-negative fraction kept in lowest terms; 0/0 is normalised to 0/1.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Rational of(std::uint64_t n, std::uint64_t d) {
    if (d == 0) return Rational{0, 1};
    const std::uint64_t g = std::gcd(n, d);
    return Rational{n / g, d / g};
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  friend bool operator==(const Rational&, const Rational&) = default;
  // Cross-multiplied; operands are small tallies so this cannot overflow.
  friend bool operator<(const Rational& a, const Rational& b) { return a.num * b.den < b.num * a.den; }
};

// ---------------------------------------------------------------------------
// RankCP

struct RankEntry {
  NodeId node;
  double lowest_prob = 1.0;
  std::size_t trace_index = 0;  // 1-based event index of the recorded minimum
  std::string state;
  std::vector<std::pair<NodeId, std::string>> parent_states;

  std::string configuration() const {
    std::string out = node_name(node) + "=" + state;
    if (!parent_states.empty()) {
      out += " |";
      for (std::size_t i = 0; i < parent_states.size(); ++i) {
        out += (i ? ", " : " ") + node_name(parent_states[i].first) + "=" + parent_states[i].second;
      }
    }
    return out;
  }

  friend bool operator==(const RankEntry&, const RankEntry&) = default;
};

struct Ranking {
  std::vector<RankEntry> entries;
  friend bool operator==(const Ranking&, const Ranking&) = default;
};

/// Orders entries by ascending lowest probability, ties by ascending trace
/// index.
inline Ranking rank_entries(std::vector<RankEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.lowest_prob != b.lowest_prob) return a.lowest_prob < b.lowest_prob;
    return a.trace_index < b.trace_index;
  });
  return Ranking{std::move(entries)};
}

/// Walks the trace once. A node's recorded minimum only moves on a strictly
/// lower probability, so a repeated minimum keeps its first occurrence.
inline Ranking rank_cp(const NodeStateTrace& trace, const Ppdg& model) {
  validate_trace(model, trace);
  std::map<NodeId, RankEntry> lowest;
  replay(model, trace, [&](std::size_t j, NodeId node, int state, const ParentConfig& config) {
    const double prob = model.probability(node, state, config);
    auto [it, fresh] = lowest.try_emplace(node);
    RankEntry& entry = it->second;
    if (!fresh && !(prob < entry.lowest_prob)) return;
    entry.node = node;
    entry.lowest_prob = prob;
    entry.trace_index = j;
    entry.state = model.states(node).at(static_cast<std::size_t>(state));
    entry.parent_states.clear();
    const auto& parents = model.parents(node);
    for (std::size_t p = 0; p < parents.size(); ++p) {
      entry.parent_states.emplace_back(
          parents[p], config[p] == kNotExecuted ? std::string(kNotExecutedName)
                                                : model.states(parents[p]).at(static_cast<std::size_t>(config[p])));
    }
  });
  std::vector<RankEntry> entries;
  entries.reserve(lowest.size());
  for (auto& [node, entry] : lowest) entries.push_back(std::move(entry));
  return rank_entries(std::move(entries));
}

// ---------------------------------------------------------------------------
// SBI

inline Rational sbi_suspiciousness(std::uint64_t failed, std::uint64_t passed) {
  return Rational::of(failed, passed + failed);
}

struct SbiEntry {
  StmtId stmt;
  std::uint64_t failed = 0;
  std::uint64_t passed = 0;
  Rational score;
  friend bool operator==(const SbiEntry&, const SbiEntry&) = default;
};

struct SbiScores {
  std::vector<SbiEntry> entries;  // by statement id, one per statement
  friend bool operator==(const SbiScores&, const SbiScores&) = default;
};

/// Tallies, per statement, the failing (FAIL or CRASH) and passing runs that
/// executed it. Statements no run executed score 0.
inline SbiScores sbi_scores(const std::vector<ExecutionResult>& results, int statement_count) {
  SbiScores scores;
  for (int i = 1; i <= statement_count; ++i) scores.entries.push_back(SbiEntry{StmtId{i}, 0, 0, {}});
  for (const ExecutionResult& r : results) {
    for (StmtId s : r.covered) {
      if (s.value < 1 || s.value > statement_count) continue;
      SbiEntry& e = scores.entries[static_cast<std::size_t>(s.value - 1)];
      (is_failing(r.verdict) ? e.failed : e.passed) += 1;
    }
  }
  for (SbiEntry& e : scores.entries) e.score = sbi_suspiciousness(e.failed, e.passed);
  return scores;
}

/// Statements by descending score, ties by ascending id.
inline std::vector<SbiEntry> sbi_ranking(const SbiScores& scores) {
  std::vector<SbiEntry> out = scores.entries;
  std::stable_sort(out.begin(), out.end(), [](const SbiEntry& a, const SbiEntry& b) {
    if (!(a.score == b.score)) return b.score < a.score;
    return a.stmt < b.stmt;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

struct RankMetrics {
  int rank = 0;
  Rational exam;  // rank / total statements
  friend bool operator==(const RankMetrics&, const RankMetrics&) = default;
};

/// Position of the faulty statement among the ranking's statement nodes (aux
/// nodes are shadows, not locations, and are skipped). A statement missing
/// from the ranking gets total + 1.
inline RankMetrics rank_metrics(const Ranking& ranking, StmtId faulty, int total_statements) {
  int position = 0;
  for (const RankEntry& e : ranking.entries) {
    if (e.node.value < 1 || e.node.value > total_statements) continue;
    ++position;
    if (e.node == node_of(faulty)) {
      return RankMetrics{position, Rational::of(static_cast<std::uint64_t>(position),
                                                static_cast<std::uint64_t>(total_statements))};
    }
  }
  const int sentinel = total_statements + 1;
  return RankMetrics{sentinel, Rational::of(static_cast<std::uint64_t>(sentinel),
                                            static_cast<std::uint64_t>(total_statements))};
}

inline RankMetrics rank_metrics(const SbiScores& scores, StmtId faulty, int total_statements) {
  const auto ordered = sbi_ranking(scores);
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (ordered[i].stmt == faulty) {
      const auto rank = static_cast<std::uint64_t>(i + 1);
      return RankMetrics{static_cast<int>(rank), Rational::of(rank, static_cast<std::uint64_t>(total_statements))};
    }
  }
  const int sentinel = total_statements + 1;
  return RankMetrics{sentinel, Rational::of(static_cast<std::uint64_t>(sentinel),
                                            static_cast<std::uint64_t>(total_statements))};
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string format_prob(double p) {
  std::ostringstream os;
  os.precision(17);
  os << p;
  return os.str();
}
}  // namespace detail

inline std::string to_csv(const Ranking& ranking) {
  std::string out = "rank,node,prob,index,configuration\n";
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const RankEntry& e = ranking.entries[i];
    out += std::to_string(i + 1) + "," + node_name(e.node) + "," + detail::format_prob(e.lowest_prob) + "," +
           std::to_string(e.trace_index) + "," + detail::csv_field(e.configuration()) + "\n";
  }
  return out;
}

inline nlohmann::json to_json(const Ranking& ranking) {
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const RankEntry& e = ranking.entries[i];
    nlohmann::json parents = nlohmann::json::object();
    for (const auto& [p, s] : e.parent_states) parents[node_name(p)] = s;
    j.push_back({{"rank", i + 1},
                 {"node", e.node.value},
                 {"prob", e.lowest_prob},
                 {"index", e.trace_index},
                 {"state", e.state},
                 {"parents", parents},
                 {"configuration", e.configuration()}});
  }
  return j;
}

inline std::string to_csv(const SbiScores& scores) {
  std::string out = "rank,node,score,failed,passed\n";
  const auto ordered = sbi_ranking(scores);
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const SbiEntry& e = ordered[i];
    out += std::to_string(i + 1) + "," + std::to_string(e.stmt.value) + "," + detail::format_prob(e.score.value()) +
           "," + std::to_string(e.failed) + "," + std::to_string(e.passed) + "\n";
  }
  return out;
}

inline nlohmann::json to_json(const SbiScores& scores) {
  nlohmann::json j = nlohmann::json::array();
  const auto ordered = sbi_ranking(scores);
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const SbiEntry& e = ordered[i];
    j.push_back({{"rank", i + 1},
                 {"node", e.stmt.value},
                 {"score", e.score.value()},
                 {"scoreExact", e.score.str()},
                 {"failed", e.failed},
                 {"passed", e.passed}});
  }
  return j;
}

}  // namespace ppdg
