#pragma once

// Control dependence (postdominator formulation) and reaching definitions.

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "ppdg/cfg.hpp"
#include "ppdg/postdom.hpp"

namespace ppdg {

struct ControlDependence {
  NodeId controller;
  NodeId dependent;
  Branch label = Branch::True;
  friend auto operator<=>(const ControlDependence&, const ControlDependence&) = default;
};

/// n1 depends on n2 under label L iff the L edge of n2 leads only to paths
/// through n1 while another out-edge of n2 can avoid it. Statements with no
/// such controller depend on ENTRY (label T).
inline std::vector<ControlDependence> control_dependences(const Cfg& cfg, const PostDomTree& pdt) {
  std::set<ControlDependence> deps;
  for (const CfgEdge& e : cfg.edges()) {
    if (!e.label) continue;
    const std::optional<NodeId> stop = pdt.ipdom(e.from);
    for (std::optional<NodeId> runner = e.to; runner && runner != stop; runner = pdt.ipdom(*runner)) {
      deps.insert(ControlDependence{e.from, *runner, *e.label});
    }
  }
  std::set<NodeId> controlled;
  for (const ControlDependence& d : deps) controlled.insert(d.dependent);
  for (int i = 1; i <= cfg.statement_count(); ++i) {
    if (!controlled.contains(NodeId{i})) deps.insert(ControlDependence{kEntry, NodeId{i}, Branch::True});
  }
  return {deps.begin(), deps.end()};
}

struct DefUse {
  NodeId def;
  NodeId use;
  std::string variable;
  friend auto operator<=>(const DefUse&, const DefUse&) = default;
};

/// Definitions reaching the entry of each CFG node, indexed like Cfg::index.
/// Only assignment statements define; input bindings are not reported.
inline std::vector<std::set<NodeId>> reaching_in_sets(const Cfg& cfg) {
  const std::size_t n = cfg.node_count();
  std::vector<std::set<NodeId>> in(n);
  std::vector<std::set<NodeId>> out(n);
  std::vector<std::vector<std::size_t>> pred(n);
  for (const CfgEdge& e : cfg.edges()) pred[cfg.index(e.to)].push_back(cfg.index(e.from));

  auto defines = [&](NodeId node) -> const std::optional<std::string>& {
    static const std::optional<std::string> kNone;
    return cfg.is_statement(node) ? cfg.statement(node).defined : kNone;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::set<NodeId> new_in;
      for (std::size_t p : pred[i]) new_in.insert(out[p].begin(), out[p].end());
      const NodeId node = cfg.node_at(i);
      std::set<NodeId> new_out;
      if (const auto& var = defines(node)) {
        for (NodeId d : new_in) {
          if (defines(d) != var) new_out.insert(d);
        }
        new_out.insert(node);
      } else {
        new_out = new_in;
      }
      if (new_in != in[i] || new_out != out[i]) {
        in[i] = std::move(new_in);
        out[i] = std::move(new_out);
        changed = true;
      }
    }
  }
  return in;
}

inline std::vector<DefUse> reaching_definitions(const Cfg& cfg) {
  const auto in = reaching_in_sets(cfg);
  std::set<DefUse> pairs;
  for (int i = 1; i <= cfg.statement_count(); ++i) {
    const NodeId use{i};
    for (const std::string& v : cfg.statement(use).used) {
      for (NodeId d : in[cfg.index(use)]) {
        if (cfg.statement(d).defined == v) pairs.insert(DefUse{d, use, v});
      }
    }
  }
  return {pairs.begin(), pairs.end()};
}

}  // namespace ppdg
