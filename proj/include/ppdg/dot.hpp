#pragma once

// Graphviz export. Control edges are solid, data edges dashed, aux nodes are
// grey ellipses. Output depends only on the graph, never on addresses.

#include <string>

#include "ppdg/cfg.hpp"
#include "ppdg/model.hpp"
#include "ppdg/pdg.hpp"
#include "ppdg/transform.hpp"

namespace ppdg {

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string dot_id(NodeId n) {
  if (n == kEntry) return "entry";
  if (n == kExit) return "exit";
  return "n" + std::to_string(n.value);
}

inline std::string dot_node(NodeId id, const std::string& label, NodeKind kind) {
  std::string attrs = "label=\"" + dot_escape(label) + "\"";
  switch (kind) {
    case NodeKind::Entry: attrs += ", shape=oval"; break;
    case NodeKind::Predicate: attrs += ", shape=diamond"; break;
    case NodeKind::Value: attrs += ", shape=box"; break;
    case NodeKind::Aux: attrs += ", shape=ellipse, style=\"filled,dashed\", fillcolor=lightgrey"; break;
  }
  return "  " + dot_id(id) + " [" + attrs + "];\n";
}

}  // namespace detail

inline std::string export_dot(const Cfg& cfg) {
  std::string out = "digraph cfg {\n  node [fontname=\"monospace\"];\n";
  out += "  entry [label=\"ENTRY\", shape=oval];\n";
  for (int i = 1; i <= cfg.statement_count(); ++i) {
    const NodeId n{i};
    const auto& info = cfg.statement(n);
    out += detail::dot_node(n, std::to_string(i) + ": " + std::string(kind_name(info.kind)),
                            info.predicate ? NodeKind::Predicate : NodeKind::Value);
  }
  out += "  exit [label=\"EXIT\", shape=oval];\n";
  for (const CfgEdge& e : cfg.edges()) {
    out += "  " + detail::dot_id(e.from) + " -> " + detail::dot_id(e.to);
    if (e.label) out += " [label=\"" + std::string(branch_name(*e.label)) + "\"]";
    out += ";\n";
  }
  return out + "}\n";
}

inline std::string export_dot(const Pdg& pdg) {
  std::string out = "digraph pdg {\n  node [fontname=\"monospace\"];\n";
  for (const PdgNode& n : pdg.nodes) {
    out += detail::dot_node(n.id, n.id == kEntry ? n.label : std::to_string(n.id.value) + ": " + n.label, n.kind);
  }
  for (const ControlDependence& e : pdg.control_edges) {
    out += "  " + detail::dot_id(e.controller) + " -> " + detail::dot_id(e.dependent) + " [label=\"" +
           std::string(branch_name(e.label)) + "\", style=solid];\n";
  }
  for (const DefUse& e : pdg.data_edges) {
    out += "  " + detail::dot_id(e.def) + " -> " + detail::dot_id(e.use) + " [label=\"" +
           detail::dot_escape(e.variable) + "\", style=dashed];\n";
  }
  return out + "}\n";
}

inline std::string export_dot(const TransformedPdg& g) {
  std::string out = "digraph ppdg {\n  node [fontname=\"monospace\"];\n";
  for (const PdgNode& n : g.nodes) {
    out += detail::dot_node(n.id, n.id == kEntry ? n.label : std::to_string(n.id.value) + ": " + n.label, n.kind);
  }
  for (const SkeletonEdge& e : g.edges) {
    const char* style = e.kind == EdgeKind::Control ? "solid" : "dashed";
    out += "  " + detail::dot_id(e.from) + " -> " + detail::dot_id(e.to) + " [label=\"" +
           detail::dot_escape(e.label) + "\", style=" + style + "];\n";
  }
  return out + "}\n";
}

inline std::string export_dot(const Ppdg& model) { return export_dot(model.skeleton()); }

}  // namespace ppdg
