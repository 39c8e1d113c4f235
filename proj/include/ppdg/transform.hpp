#pragma once

// PDG -> acyclic skeleton. Every dependence that runs against statement order
// (target id <= source id, i.e. carried around a loop back edge) is removed
// and replaced by a fresh auxiliary node that shadows the source and feeds the
// target. A loop predicate's control dependence on itself is dropped: its
// re-evaluation always follows a TRUE outcome, so a shadow of it would carry
// no information.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ppdg/pdg.hpp"

namespace ppdg {

enum class EdgeKind { Control, Data, Aux };

constexpr std::string_view edge_kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::Control: return "control";
    case EdgeKind::Data: return "data";
    case EdgeKind::Aux: return "aux";
  }
  return "?";
}

struct SkeletonEdge {
  NodeId from;
  NodeId to;
  EdgeKind kind = EdgeKind::Control;
  std::string label;  // T/F for control, variable for data/aux
  friend auto operator<=>(const SkeletonEdge&, const SkeletonEdge&) = default;
};

/// The dependence an auxiliary node stands in for.
struct AuxInfo {
  NodeId shadowed;
  NodeId target;
  std::string variable;  // empty when the rerouted edge was a control edge
  std::string branch;    // T/F when the rerouted edge was a control edge
  friend bool operator==(const AuxInfo&, const AuxInfo&) = default;
};

struct TransformedPdg {
  int statement_count = 0;
  std::vector<PdgNode> nodes;  // PDG nodes, then aux nodes by id
  std::vector<SkeletonEdge> edges;
  std::map<NodeId, AuxInfo> aux;
  std::vector<ControlDependence> dropped_self_control;

  bool contains(NodeId n) const {
    return std::any_of(nodes.begin(), nodes.end(), [&](const PdgNode& p) { return p.id == n; });
  }

  const PdgNode& node(NodeId id) const {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const PdgNode& n) { return n.id == id; });
    if (it == nodes.end()) throw std::out_of_range("no skeleton node " + node_name(id));
    return *it;
  }

  /// Distinct sources of incoming edges, ascending. ENTRY is omitted: it has
  /// a single constant state and never changes a configuration.
  std::vector<NodeId> parents(NodeId n) const {
    std::set<NodeId> ps;
    for (const SkeletonEdge& e : edges) {
      if (e.to == n && e.from != kEntry) ps.insert(e.from);
    }
    return {ps.begin(), ps.end()};
  }

  /// Aux nodes feeding `target`, ascending.
  std::vector<NodeId> aux_feeding(NodeId target) const {
    std::vector<NodeId> out;
    for (const auto& [id, info] : aux) {
      if (info.target == target) out.push_back(id);
    }
    return out;
  }

  friend bool operator==(const TransformedPdg&, const TransformedPdg&) = default;
};

/// Kahn's algorithm; true when the edge relation has no cycle.
inline bool is_acyclic(const TransformedPdg& g) {
  std::map<NodeId, int> indegree;
  std::map<NodeId, std::vector<NodeId>> succ;
  for (const PdgNode& n : g.nodes) indegree[n.id] = 0;
  for (const SkeletonEdge& e : g.edges) {
    ++indegree[e.to];
    succ[e.from].push_back(e.to);
  }
  std::vector<NodeId> ready;
  for (const auto& [n, d] : indegree) {
    if (d == 0) ready.push_back(n);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const NodeId n = ready.back();
    ready.pop_back();
    ++visited;
    for (NodeId s : succ[n]) {
      if (--indegree[s] == 0) ready.push_back(s);
    }
  }
  return visited == indegree.size();
}

inline TransformedPdg transform_pdg(const Pdg& pdg) {
  TransformedPdg out;
  out.statement_count = pdg.statement_count;
  out.nodes = pdg.nodes;

  auto backward = [](NodeId from, NodeId to) { return from != kEntry && to <= from; };

  int next_aux = pdg.statement_count + 1;
  auto add_aux = [&](NodeId shadowed, NodeId target, AuxInfo info, std::string label) {
    const NodeId id{next_aux++};
    std::string text = "aux " + node_name(shadowed) + "->" + node_name(target);
    if (!label.empty()) text += " (" + label + ")";
    out.nodes.push_back(PdgNode{id, NodeKind::Aux, std::move(text)});
    out.edges.push_back(SkeletonEdge{id, target, EdgeKind::Aux, std::move(label)});
    out.aux.emplace(id, std::move(info));
  };

  std::vector<ControlDependence> control = pdg.control_edges;
  std::vector<DefUse> data = pdg.data_edges;
  std::sort(control.begin(), control.end());
  std::sort(data.begin(), data.end());

  for (const ControlDependence& e : control) {
    if (!backward(e.controller, e.dependent)) {
      out.edges.push_back(SkeletonEdge{e.controller, e.dependent, EdgeKind::Control,
                                       std::string(branch_name(e.label))});
    } else if (e.controller == e.dependent) {
      out.dropped_self_control.push_back(e);
    } else {
      const std::string b(branch_name(e.label));
      add_aux(e.controller, e.dependent, AuxInfo{e.controller, e.dependent, "", b}, b);
    }
  }
  for (const DefUse& e : data) {
    if (!backward(e.def, e.use)) {
      out.edges.push_back(SkeletonEdge{e.def, e.use, EdgeKind::Data, e.variable});
    } else {
      add_aux(e.def, e.use, AuxInfo{e.def, e.use, e.variable, ""}, e.variable);
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

}  // namespace ppdg
