#pragma once

// Program dependence graph: ENTRY plus one node per statement, control edges
// labelled T/F and data edges labelled with the variable.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppdg/ast.hpp"
#include "ppdg/cfg.hpp"
#include "ppdg/dependence.hpp"
#include "ppdg/postdom.hpp"
#include "ppdg/statements.hpp"

namespace ppdg {

enum class NodeKind { Entry, Predicate, Value, Aux };

constexpr std::string_view node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Entry: return "entry";
    case NodeKind::Predicate: return "predicate";
    case NodeKind::Value: return "value";
    case NodeKind::Aux: return "aux";
  }
  return "?";
}

inline NodeKind parse_node_kind(std::string_view s) {
  if (s == "entry") return NodeKind::Entry;
  if (s == "predicate") return NodeKind::Predicate;
  if (s == "value") return NodeKind::Value;
  if (s == "aux") return NodeKind::Aux;
  throw std::invalid_argument("unknown node kind '" + std::string(s) + "'");
}

struct PdgNode {
  NodeId id;
  NodeKind kind = NodeKind::Value;
  std::string label;
  friend bool operator==(const PdgNode&, const PdgNode&) = default;
};

struct Pdg {
  int statement_count = 0;
  std::vector<PdgNode> nodes;  // ENTRY first, then statements by id
  std::vector<ControlDependence> control_edges;
  std::vector<DefUse> data_edges;

  const PdgNode& node(NodeId id) const {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const PdgNode& n) { return n.id == id; });
    if (it == nodes.end()) throw std::out_of_range("no PDG node " + node_name(id));
    return *it;
  }

  friend bool operator==(const Pdg&, const Pdg&) = default;
};

inline Pdg build_pdg(const Ast& ast, const Cfg& cfg, std::vector<ControlDependence> cds,
                     std::vector<DefUse> du_pairs) {
  if (cfg.statement_count() != ast.statement_count) {
    throw std::invalid_argument("CFG and AST describe different programs");
  }
  Pdg pdg;
  pdg.statement_count = ast.statement_count;
  pdg.nodes.push_back(PdgNode{kEntry, NodeKind::Entry, "ENTRY"});
  for_each_stmt(ast, [&](const Stmt& s) {
    pdg.nodes.push_back(PdgNode{node_of(s.id), s.is_predicate() ? NodeKind::Predicate : NodeKind::Value,
                                statement_label(s)});
  });
  std::sort(cds.begin(), cds.end());
  std::sort(du_pairs.begin(), du_pairs.end());
  pdg.control_edges = std::move(cds);
  pdg.data_edges = std::move(du_pairs);
  return pdg;
}

/// Full pipeline from an Ast.
inline Pdg build_pdg(const Ast& ast) {
  const Cfg cfg = build_cfg(ast);
  const PostDomTree pdt = compute_postdominators(cfg);
  return build_pdg(ast, cfg, control_dependences(cfg, pdt), reaching_definitions(cfg));
}

inline nlohmann::json to_json(const Pdg& pdg) {
  nlohmann::json j;
  j["statementCount"] = pdg.statement_count;
  j["nodes"] = nlohmann::json::array();
  for (const PdgNode& n : pdg.nodes) {
    j["nodes"].push_back({{"id", n.id.value}, {"kind", std::string(node_kind_name(n.kind))}, {"label", n.label}});
  }
  j["controlEdges"] = nlohmann::json::array();
  for (const ControlDependence& e : pdg.control_edges) {
    j["controlEdges"].push_back(
        {{"src", e.controller.value}, {"dst", e.dependent.value}, {"label", std::string(branch_name(e.label))}});
  }
  j["dataEdges"] = nlohmann::json::array();
  for (const DefUse& e : pdg.data_edges) {
    j["dataEdges"].push_back({{"src", e.def.value}, {"dst", e.use.value}, {"variable", e.variable}});
  }
  return j;
}

inline Pdg pdg_from_json(const nlohmann::json& j) {
  Pdg pdg;
  pdg.statement_count = j.at("statementCount").get<int>();
  for (const auto& n : j.at("nodes")) {
    pdg.nodes.push_back(PdgNode{NodeId{n.at("id").get<int>()},
                                parse_node_kind(n.at("kind").get<std::string>()),
                                n.at("label").get<std::string>()});
  }
  for (const auto& e : j.at("controlEdges")) {
    const std::string label = e.at("label").get<std::string>();
    if (label != "T" && label != "F") throw std::invalid_argument("control edge label must be T or F");
    pdg.control_edges.push_back(ControlDependence{NodeId{e.at("src").get<int>()}, NodeId{e.at("dst").get<int>()},
                                                  label == "T" ? Branch::True : Branch::False});
  }
  for (const auto& e : j.at("dataEdges")) {
    pdg.data_edges.push_back(DefUse{NodeId{e.at("src").get<int>()}, NodeId{e.at("dst").get<int>()},
                                    e.at("variable").get<std::string>()});
  }
  return pdg;
}

}  // namespace ppdg
