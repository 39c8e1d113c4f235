#pragma once

// Immediate postdominators, Cooper/Harvey/Kennedy iterative scheme run on the
// reversed CFG.

#include <map>
#include <optional>
#include <vector>

#include "ppdg/cfg.hpp"

namespace ppdg {

class PostDomTree {
 public:
  explicit PostDomTree(std::map<NodeId, NodeId> ipdom) : ipdom_(std::move(ipdom)) {}

  /// Immediate postdominator; nullopt for EXIT.
  std::optional<NodeId> ipdom(NodeId n) const {
    auto it = ipdom_.find(n);
    if (it == ipdom_.end()) return std::nullopt;
    return it->second;
  }

  /// True when every path from n to EXIT passes through d (reflexive).
  bool postdominates(NodeId d, NodeId n) const {
    for (std::optional<NodeId> cur = n; cur; cur = ipdom(*cur)) {
      if (*cur == d) return true;
    }
    return false;
  }

  const std::map<NodeId, NodeId>& entries() const { return ipdom_; }

 private:
  std::map<NodeId, NodeId> ipdom_;
};

inline PostDomTree compute_postdominators(const Cfg& cfg) {
  const std::size_t n = cfg.node_count();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::vector<std::size_t>> pred(n);
  for (const CfgEdge& e : cfg.edges()) {
    succ[cfg.index(e.from)].push_back(cfg.index(e.to));
    pred[cfg.index(e.to)].push_back(cfg.index(e.from));
  }
  const std::size_t exit = cfg.index(kExit);

  // Postorder over the reversed graph (edges followed backwards from EXIT).
  std::vector<std::size_t> order;
  std::vector<char> seen(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack{{exit, 0}};
  seen[exit] = 1;
  while (!stack.empty()) {
    auto& [node, next_child] = stack.back();
    if (next_child < pred[node].size()) {
      const std::size_t child = pred[node][next_child++];
      if (!seen[child]) {
        seen[child] = 1;
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  std::vector<std::size_t> rank(n, 0);
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  constexpr std::size_t kUndefined = static_cast<std::size_t>(-1);
  std::vector<std::size_t> ipdom(n, kUndefined);
  ipdom[exit] = exit;

  auto intersect = [&](std::size_t a, std::size_t b) {
    while (a != b) {
      while (rank[a] < rank[b]) a = ipdom[a];
      while (rank[b] < rank[a]) b = ipdom[b];
    }
    return a;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t node = *it;
      if (node == exit) continue;
      std::size_t candidate = kUndefined;
      for (std::size_t s : succ[node]) {
        if (ipdom[s] == kUndefined) continue;
        candidate = candidate == kUndefined ? s : intersect(s, candidate);
      }
      if (candidate != ipdom[node]) {
        ipdom[node] = candidate;
        changed = true;
      }
    }
  }

  std::map<NodeId, NodeId> result;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == exit || ipdom[i] == kUndefined) continue;
    result.emplace(cfg.node_at(i), cfg.node_at(ipdom[i]));
  }
  return PostDomTree(std::move(result));
}

}  // namespace ppdg
