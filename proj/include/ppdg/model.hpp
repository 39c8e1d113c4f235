#pragma once

// Probabilistic PDG: acyclic skeleton, per-node discrete state spaces and
// conditional probability tables learned by counting over node-state traces.
//
//   parentless node:  p(X = x)           = n(X = x) / n(X)
//   otherwise:        p(X = x | Pa = pa) = n(X = x, Pa = pa) / n(Pa = pa)
//
// A parent configuration assigns each parent its most recent state earlier in
// the same trace, or NOT_EXECUTED when it has not occurred yet.

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppdg/ast.hpp"
#include "ppdg/trace.hpp"
#include "ppdg/transform.hpp"

namespace ppdg {

inline constexpr int kNotExecuted = -1;
inline constexpr std::string_view kNotExecutedName = "NOT_EXECUTED";

/// State index per parent, in TransformedPdg::parents order.
using ParentConfig = std::vector<int>;

/// Abstraction of the value computed by an assignment or print.
template <class P>
concept StateAbstraction = requires(const P& p, std::int64_t v) {
  { p.value_states() } -> std::convertible_to<std::vector<std::string>>;
  { p.classify(v) } -> std::convertible_to<int>;
};

/// Sign of the value: NEG, ZERO, POS.
struct SignAbstraction {
  std::vector<std::string> value_states() const { return {"NEG", "ZERO", "POS"}; }
  int classify(std::int64_t v) const { return v < 0 ? 0 : (v == 0 ? 1 : 2); }
};

inline const std::vector<std::string>& predicate_states() {
  static const std::vector<std::string> kStates{"TRUE", "FALSE"};
  return kStates;
}

enum class Smoothing { Off, Laplace };

inline Smoothing parse_smoothing(std::string_view s) {
  if (s == "off") return Smoothing::Off;
  if (s == "laplace") return Smoothing::Laplace;
  throw std::invalid_argument("smoothing must be 'off' or 'laplace', got '" + std::string(s) + "'");
}

constexpr std::string_view smoothing_name(Smoothing s) { return s == Smoothing::Off ? "off" : "laplace"; }

class Ppdg {
 public:
  /// Counts for one node: parent configuration -> count per state.
  using Table = std::map<ParentConfig, std::vector<std::uint64_t>>;

  Ppdg() = default;
  Ppdg(TransformedPdg skeleton, std::map<NodeId, std::vector<std::string>> states)
      : skeleton_(std::move(skeleton)), states_(std::move(states)) {
    for (const PdgNode& n : skeleton_.nodes) parents_[n.id] = skeleton_.parents(n.id);
  }

  const TransformedPdg& skeleton() const { return skeleton_; }
  const std::map<NodeId, std::vector<std::string>>& state_spaces() const { return states_; }

  bool has_node(NodeId n) const { return states_.contains(n); }

  const std::vector<std::string>& states(NodeId n) const {
    auto it = states_.find(n);
    if (it == states_.end()) throw std::out_of_range("node " + node_name(n) + " not in PPDG");
    return it->second;
  }

  std::optional<int> state_index(NodeId n, std::string_view state) const {
    const auto& s = states(n);
    auto it = std::find(s.begin(), s.end(), state);
    if (it == s.end()) return std::nullopt;
    return static_cast<int>(it - s.begin());
  }

  const std::vector<NodeId>& parents(NodeId n) const {
    static const std::vector<NodeId> kNone;
    auto it = parents_.find(n);
    return it == parents_.end() ? kNone : it->second;
  }

  const Table& table(NodeId n) const {
    static const Table kEmpty;
    auto it = counts_.find(n);
    return it == counts_.end() ? kEmpty : it->second;
  }

  const std::map<NodeId, Table>& counts() const { return counts_; }

  void increment(NodeId n, const ParentConfig& config, int state, std::uint64_t by = 1) {
    auto& row = counts_[n][config];
    if (row.empty()) row.assign(states(n).size(), 0);
    row.at(static_cast<std::size_t>(state)) += by;
  }

  /// Adds another model's counts (same skeleton). Counting commutes, so
  /// per-producer models can be merged in any order.
  void merge(const Ppdg& other) {
    for (const auto& [node, table] : other.counts_) {
      for (const auto& [config, row] : table) {
        for (std::size_t s = 0; s < row.size(); ++s) {
          if (row[s]) increment(node, config, static_cast<int>(s), row[s]);
        }
      }
    }
  }

  std::uint64_t total_count() const {
    std::uint64_t total = 0;
    for (const auto& [node, table] : counts_) {
      for (const auto& [config, row] : table) {
        for (std::uint64_t c : row) total += c;
      }
    }
    return total;
  }

  Smoothing smoothing() const { return smoothing_; }
  void set_smoothing(Smoothing s) { smoothing_ = s; }

  /// Count ratio for `state` under `config`. An unseen configuration gives
  /// 0.0 unless Laplace smoothing is on.
  double probability(NodeId n, int state, const ParentConfig& config) const {
    const std::size_t k = states(n).size();
    const Table& t = table(n);
    auto it = t.find(config);
    std::uint64_t hit = 0;
    std::uint64_t total = 0;
    if (it != t.end()) {
      hit = it->second.at(static_cast<std::size_t>(state));
      for (std::uint64_t c : it->second) total += c;
    }
    if (smoothing_ == Smoothing::Laplace) {
      return (static_cast<double>(hit) + 1.0) / (static_cast<double>(total) + static_cast<double>(k));
    }
    if (total == 0) return 0.0;
    return static_cast<double>(hit) / static_cast<double>(total);
  }

  friend bool operator==(const Ppdg& a, const Ppdg& b) {
    return a.skeleton_ == b.skeleton_ && a.states_ == b.states_ && a.counts_ == b.counts_ &&
           a.smoothing_ == b.smoothing_;
  }

 private:
  TransformedPdg skeleton_;
  std::map<NodeId, std::vector<std::string>> states_;
  std::map<NodeId, std::vector<NodeId>> parents_;
  std::map<NodeId, Table> counts_;
  Smoothing smoothing_ = Smoothing::Off;
};

/// Predicates get TRUE/FALSE, assignments and prints the abstraction's value
/// states, ENTRY the single state RUN, aux nodes the space of the node they
/// shadow.
template <StateAbstraction Abstraction = SignAbstraction>
Ppdg assign_state_spaces(const TransformedPdg& tpdg, const Ast& ast, const Abstraction& abstraction = {}) {
  if (tpdg.statement_count != ast.statement_count) {
    throw std::invalid_argument("skeleton and AST describe different programs");
  }
  const auto stmts = flatten(ast);
  std::map<NodeId, std::vector<std::string>> states;
  auto space_of = [&](NodeId n) -> std::vector<std::string> {
    if (n == kEntry) return {"RUN"};
    const Stmt& s = *stmts.at(static_cast<std::size_t>(n.value - 1));
    return s.is_predicate() ? predicate_states() : abstraction.value_states();
  };
  for (const PdgNode& n : tpdg.nodes) {
    if (n.kind == NodeKind::Aux) {
      states[n.id] = space_of(tpdg.aux.at(n.id).shadowed);
    } else {
      states[n.id] = space_of(n.id);
    }
  }
  return Ppdg(tpdg, std::move(states));
}

/// Throws TraceError if an event names a node or state outside the model.
inline void validate_trace(const Ppdg& model, const NodeStateTrace& trace) {
  for (std::size_t j = 0; j < trace.events.size(); ++j) {
    const TraceEvent& e = trace.events[j];
    if (!model.has_node(e.node) || e.node == kEntry) {
      throw TraceError("trace '" + trace.test_id + "' event " + std::to_string(j + 1) + ": unknown node " +
                       node_name(e.node));
    }
    if (!model.state_index(e.node, e.state)) {
      throw TraceError("trace '" + trace.test_id + "' event " + std::to_string(j + 1) + ": node " +
                       node_name(e.node) + " has no state '" + e.state + "'");
    }
  }
}

/// Walks a trace, handing fn(index, node, state, parent_config) for each
/// event with the most-recent-state configuration of the node's parents.
/// `index` is 1-based. The trace must already be validated.
template <class Fn>
void replay(const Ppdg& model, const NodeStateTrace& trace, Fn&& fn) {
  std::map<NodeId, int> latest;
  ParentConfig config;
  for (std::size_t j = 0; j < trace.events.size(); ++j) {
    const TraceEvent& e = trace.events[j];
    const int state = *model.state_index(e.node, e.state);
    const auto& parents = model.parents(e.node);
    config.assign(parents.size(), kNotExecuted);
    for (std::size_t p = 0; p < parents.size(); ++p) {
      auto it = latest.find(parents[p]);
      if (it != latest.end()) config[p] = it->second;
    }
    fn(j + 1, e.node, state, static_cast<const ParentConfig&>(config));
    latest[e.node] = state;
  }
}

/// Counts every event of every trace into a copy of `skeleton`. All traces
/// are validated before any counting, so a bad trace leaves nothing half
/// counted.
inline Ppdg learn_params(const std::vector<NodeStateTrace>& traces, const Ppdg& skeleton) {
  for (const NodeStateTrace& t : traces) validate_trace(skeleton, t);
  Ppdg model = skeleton;
  for (const NodeStateTrace& t : traces) {
    replay(model, t, [&](std::size_t, NodeId node, int state, const ParentConfig& config) {
      model.increment(node, config, state);
    });
  }
  return model;
}

inline double query_prob(const Ppdg& model, NodeId node, int state, const ParentConfig& config) {
  return model.probability(node, state, config);
}

inline double query_prob(const Ppdg& model, NodeId node, std::string_view state, const ParentConfig& config) {
  const auto idx = model.state_index(node, state);
  if (!idx) throw std::invalid_argument("node " + node_name(node) + " has no state '" + std::string(state) + "'");
  return model.probability(node, *idx, config);
}

/// "3=TRUE, 7=NOT_EXECUTED" for a parent configuration.
inline std::string describe_config(const Ppdg& model, NodeId node, const ParentConfig& config) {
  std::string out;
  const auto& parents = model.parents(node);
  for (std::size_t p = 0; p < parents.size() && p < config.size(); ++p) {
    if (p) out += ", ";
    out += node_name(parents[p]) + "=";
    out += config[p] == kNotExecuted ? std::string(kNotExecutedName)
                                     : model.states(parents[p]).at(static_cast<std::size_t>(config[p]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const TransformedPdg& g) {
  nlohmann::json j;
  j["statementCount"] = g.statement_count;
  j["nodes"] = nlohmann::json::array();
  for (const PdgNode& n : g.nodes) {
    nlohmann::json jn{{"id", n.id.value}, {"kind", std::string(node_kind_name(n.kind))}, {"label", n.label}};
    if (auto it = g.aux.find(n.id); it != g.aux.end()) {
      jn["aux"] = {{"shadows", it->second.shadowed.value},
                   {"target", it->second.target.value},
                   {"variable", it->second.variable},
                   {"branch", it->second.branch}};
    }
    j["nodes"].push_back(std::move(jn));
  }
  j["edges"] = nlohmann::json::array();
  for (const SkeletonEdge& e : g.edges) {
    j["edges"].push_back({{"src", e.from.value},
                          {"dst", e.to.value},
                          {"kind", std::string(edge_kind_name(e.kind))},
                          {"label", e.label}});
  }
  j["droppedSelfControl"] = nlohmann::json::array();
  for (const ControlDependence& e : g.dropped_self_control) {
    j["droppedSelfControl"].push_back(
        {{"src", e.controller.value}, {"dst", e.dependent.value}, {"label", std::string(branch_name(e.label))}});
  }
  return j;
}

inline TransformedPdg transformed_pdg_from_json(const nlohmann::json& j) {
  TransformedPdg g;
  g.statement_count = j.at("statementCount").get<int>();
  for (const auto& jn : j.at("nodes")) {
    const NodeId id{jn.at("id").get<int>()};
    g.nodes.push_back(PdgNode{id, parse_node_kind(jn.at("kind").get<std::string>()), jn.at("label").get<std::string>()});
    if (jn.contains("aux")) {
      const auto& a = jn.at("aux");
      g.aux.emplace(id, AuxInfo{NodeId{a.at("shadows").get<int>()}, NodeId{a.at("target").get<int>()},
                                a.at("variable").get<std::string>(), a.at("branch").get<std::string>()});
    }
  }
  for (const auto& je : j.at("edges")) {
    const std::string kind = je.at("kind").get<std::string>();
    EdgeKind k = EdgeKind::Control;
    if (kind == "data") {
      k = EdgeKind::Data;
    } else if (kind == "aux") {
      k = EdgeKind::Aux;
    } else if (kind != "control") {
      throw std::invalid_argument("unknown edge kind '" + kind + "'");
    }
    g.edges.push_back(SkeletonEdge{NodeId{je.at("src").get<int>()}, NodeId{je.at("dst").get<int>()}, k,
                                   je.at("label").get<std::string>()});
  }
  for (const auto& je : j.value("droppedSelfControl", nlohmann::json::array())) {
    g.dropped_self_control.push_back(ControlDependence{NodeId{je.at("src").get<int>()},
                                                       NodeId{je.at("dst").get<int>()},
                                                       je.at("label").get<std::string>() == "F" ? Branch::False
                                                                                                 : Branch::True});
  }
  return g;
}

inline nlohmann::json to_json(const Ppdg& model) {
  nlohmann::json j;
  j["format"] = "ppdg/1";
  j["smoothing"] = std::string(smoothing_name(model.smoothing()));
  j["skeleton"] = to_json(model.skeleton());
  j["stateSpaces"] = nlohmann::json::object();
  for (const auto& [node, states] : model.state_spaces()) j["stateSpaces"][std::to_string(node.value)] = states;
  j["counts"] = nlohmann::json::array();
  for (const auto& [node, table] : model.counts()) {
    for (const auto& [config, row] : table) {
      nlohmann::json cfg = nlohmann::json::array();
      const auto& parents = model.parents(node);
      for (std::size_t p = 0; p < config.size(); ++p) {
        cfg.push_back(config[p] == kNotExecuted ? std::string(kNotExecutedName)
                                                : model.states(parents[p]).at(static_cast<std::size_t>(config[p])));
      }
      j["counts"].push_back({{"node", node.value}, {"config", cfg}, {"counts", row}});
    }
  }
  return j;
}

inline Ppdg ppdg_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "ppdg/1") throw std::invalid_argument("not a ppdg/1 document");
  std::map<NodeId, std::vector<std::string>> states;
  for (const auto& [key, value] : j.at("stateSpaces").items()) {
    states[NodeId{std::stoi(key)}] = value.get<std::vector<std::string>>();
  }
  Ppdg model(transformed_pdg_from_json(j.at("skeleton")), std::move(states));
  model.set_smoothing(parse_smoothing(j.value("smoothing", std::string("off"))));
  for (const auto& jc : j.at("counts")) {
    const NodeId node{jc.at("node").get<int>()};
    const auto& parents = model.parents(node);
    const auto names = jc.at("config").get<std::vector<std::string>>();
    if (names.size() != parents.size()) {
      throw std::invalid_argument("count row for node " + node_name(node) + " has wrong configuration width");
    }
    ParentConfig config(names.size(), kNotExecuted);
    for (std::size_t p = 0; p < names.size(); ++p) {
      if (names[p] == kNotExecutedName) continue;
      auto idx = model.state_index(parents[p], names[p]);
      if (!idx) throw std::invalid_argument("unknown state '" + names[p] + "'");
      config[p] = *idx;
    }
    const auto row = jc.at("counts").get<std::vector<std::uint64_t>>();
    if (row.size() != model.states(node).size()) {
      throw std::invalid_argument("count row for node " + node_name(node) + " has wrong width");
    }
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (row[s]) model.increment(node, config, static_cast<int>(s), row[s]);
    }
  }
  return model;
}

}  // namespace ppdg
