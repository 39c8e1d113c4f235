#pragma once

// Statement-level control flow graph.

#include <algorithm>
#include <compare>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ppdg/ast.hpp"
#include "ppdg/statements.hpp"

namespace ppdg {

/// Graph node. 0 is ENTRY, 1..N are statements (same number as the StmtId),
/// larger ids are auxiliary nodes of a transformed PDG, and EXIT sorts last.
struct NodeId {
  int value = 0;
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

inline constexpr NodeId kEntry{0};
inline constexpr NodeId kExit{std::numeric_limits<int>::max()};

constexpr NodeId node_of(StmtId s) { return NodeId{s.value}; }

inline std::string node_name(NodeId n) {
  if (n == kEntry) return "ENTRY";
  if (n == kExit) return "EXIT";
  return std::to_string(n.value);
}

enum class Branch { True, False };

constexpr std::string_view branch_name(Branch b) { return b == Branch::True ? "T" : "F"; }

struct CfgEdge {
  NodeId from;
  NodeId to;
  std::optional<Branch> label;
  friend auto operator<=>(const CfgEdge&, const CfgEdge&) = default;
};

class Cfg {
 public:
  explicit Cfg(std::vector<StatementInfo> statements)
      : statements_(std::move(statements)) {}

  int statement_count() const { return static_cast<int>(statements_.size()); }

  /// ENTRY, statements in id order, EXIT.
  std::vector<NodeId> nodes() const {
    std::vector<NodeId> out;
    out.push_back(kEntry);
    for (int i = 1; i <= statement_count(); ++i) out.push_back(NodeId{i});
    out.push_back(kExit);
    return out;
  }

  std::size_t node_count() const { return statements_.size() + 2; }

  /// Dense index in [0, node_count()): ENTRY 0, statements 1..N, EXIT N+1.
  std::size_t index(NodeId n) const {
    return n == kExit ? statements_.size() + 1 : static_cast<std::size_t>(n.value);
  }
  NodeId node_at(std::size_t i) const {
    return i == statements_.size() + 1 ? kExit : NodeId{static_cast<int>(i)};
  }

  const std::vector<CfgEdge>& edges() const { return edges_; }

  std::vector<CfgEdge> successors(NodeId n) const {
    std::vector<CfgEdge> out;
    for (const CfgEdge& e : edges_) {
      if (e.from == n) out.push_back(e);
    }
    return out;
  }

  std::vector<CfgEdge> predecessors(NodeId n) const {
    std::vector<CfgEdge> out;
    for (const CfgEdge& e : edges_) {
      if (e.to == n) out.push_back(e);
    }
    return out;
  }

  bool is_statement(NodeId n) const { return n.value >= 1 && n.value <= statement_count(); }

  const StatementInfo& statement(NodeId n) const {
    return statements_.at(static_cast<std::size_t>(n.value - 1));
  }

  bool is_predicate(NodeId n) const { return is_statement(n) && statement(n).predicate; }

  void add_edge(NodeId from, NodeId to, std::optional<Branch> label) {
    edges_.push_back(CfgEdge{from, to, label});
  }
  void sort_edges() { std::sort(edges_.begin(), edges_.end()); }

 private:
  std::vector<StatementInfo> statements_;
  std::vector<CfgEdge> edges_;
};

namespace detail {

// Wires `block` so that control leaves it towards `follow`; returns the node
// control enters the block at (follow itself for an empty block).
inline NodeId wire_block(Cfg& cfg, const std::vector<Stmt>& block, NodeId follow) {
  NodeId next = follow;
  for (auto it = block.rbegin(); it != block.rend(); ++it) {
    const Stmt& s = *it;
    const NodeId self = node_of(s.id);
    switch (s.kind) {
      case Stmt::Kind::Assign:
      case Stmt::Kind::Print:
        cfg.add_edge(self, next, std::nullopt);
        break;
      case Stmt::Kind::If:
        cfg.add_edge(self, wire_block(cfg, s.body, next), Branch::True);
        cfg.add_edge(self, wire_block(cfg, s.else_body, next), Branch::False);
        break;
      case Stmt::Kind::While:
        cfg.add_edge(self, wire_block(cfg, s.body, self), Branch::True);
        cfg.add_edge(self, next, Branch::False);
        break;
    }
    next = self;
  }
  return next;
}

}  // namespace detail

inline Cfg build_cfg(const Ast& ast) {
  Cfg cfg(list_statements(ast));
  cfg.add_edge(kEntry, detail::wire_block(cfg, ast.statements, kExit), std::nullopt);
  cfg.sort_edges();
  return cfg;
}

}  // namespace ppdg
