#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace dgtrace::graph {

using NodeIndex = std::uint32_t;
using Edge = std::pair<NodeIndex, NodeIndex>;

namespace detail {
inline std::uint64_t edge_key(NodeIndex u, NodeIndex v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}
}  // namespace detail

// Directed graph over named nodes. Parallel edges collapse; self-loops are kept.
class Digraph {
 public:
  NodeIndex add_node(std::string_view name) {
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    auto id = static_cast<NodeIndex>(names_.size());
    names_.emplace_back(name);
    index_.emplace(std::string(name), id);
    out_.emplace_back();
    in_.emplace_back();
    return id;
  }

  bool add_edge(NodeIndex u, NodeIndex v) {
    if (u >= names_.size() || v >= names_.size()) throw std::out_of_range("Digraph::add_edge");
    if (!edge_set_.insert(detail::edge_key(u, v)).second) return false;
    out_[u].push_back(v);
    in_[v].push_back(u);
    return true;
  }

  bool add_edge(std::string_view u, std::string_view v) { return add_edge(add_node(u), add_node(v)); }

  std::size_t node_count() const { return names_.size(); }
  std::size_t edge_count() const { return edge_set_.size(); }
  bool empty() const { return names_.empty(); }

  const std::string& name(NodeIndex v) const { return names_.at(v); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<NodeIndex> find(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view name) const { return index_.find(name) != index_.end(); }

  bool has_edge(NodeIndex u, NodeIndex v) const { return edge_set_.count(detail::edge_key(u, v)) > 0; }

  std::span<const NodeIndex> successors(NodeIndex v) const { return out_.at(v); }
  std::span<const NodeIndex> predecessors(NodeIndex v) const { return in_.at(v); }

  std::vector<Edge> edges() const {
    std::vector<Edge> e;
    e.reserve(edge_count());
    for (NodeIndex u = 0; u < out_.size(); ++u)
      for (NodeIndex v : out_[u]) e.emplace_back(u, v);
    return e;
  }

  // Edges as name pairs sorted lexicographically.
  std::vector<std::pair<std::string, std::string>> named_edges() const {
    std::vector<std::pair<std::string, std::string>> e;
    e.reserve(edge_count());
    for (auto [u, v] : edges()) e.emplace_back(names_[u], names_[v]);
    std::sort(e.begin(), e.end());
    return e;
  }

  std::vector<NodeIndex> sorted_by_name() const {
    std::vector<NodeIndex> order(names_.size());
    for (NodeIndex i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) { return names_[a] < names_[b]; });
    return order;
  }

  // Induced subgraph on the nodes with keep[v] set. Node order is preserved.
  Digraph induced(const std::vector<bool>& keep) const {
    Digraph g;
    std::vector<NodeIndex> remap(names_.size(), 0);
    for (NodeIndex v = 0; v < names_.size(); ++v)
      if (keep.at(v)) remap[v] = g.add_node(names_[v]);
    for (NodeIndex u = 0; u < names_.size(); ++u) {
      if (!keep[u]) continue;
      for (NodeIndex v : out_[u])
        if (keep[v]) g.add_edge(remap[u], remap[v]);
    }
    return g;
  }

  Digraph induced(std::span<const NodeIndex> nodes) const {
    std::vector<bool> keep(names_.size(), false);
    for (NodeIndex v : nodes) keep.at(v) = true;
    return induced(keep);
  }

  Digraph reversed() const {
    Digraph g;
    for (const auto& n : names_) g.add_node(n);
    for (auto [u, v] : edges()) g.add_edge(v, u);
    return g;
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, NodeIndex, std::less<>> index_;
  std::vector<std::vector<NodeIndex>> out_, in_;
  std::unordered_set<std::uint64_t> edge_set_;
};

// Simple undirected graph over named nodes; edges are stored once with the
// smaller index first. Self-loops are dropped.
class UndirectedGraph {
 public:
  NodeIndex add_node(std::string_view name) {
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    auto id = static_cast<NodeIndex>(names_.size());
    names_.emplace_back(name);
    index_.emplace(std::string(name), id);
    adj_.emplace_back();
    return id;
  }

  bool add_edge(NodeIndex u, NodeIndex v) {
    if (u >= names_.size() || v >= names_.size()) throw std::out_of_range("UndirectedGraph::add_edge");
    if (u == v) return false;
    if (u > v) std::swap(u, v);
    if (!edge_set_.insert(detail::edge_key(u, v)).second) return false;
    adj_[u].push_back(v);
    adj_[v].push_back(u);
    edges_.emplace_back(u, v);
    return true;
  }

  bool add_edge(std::string_view u, std::string_view v) { return add_edge(add_node(u), add_node(v)); }

  std::size_t node_count() const { return names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::string& name(NodeIndex v) const { return names_.at(v); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<NodeIndex> find(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::span<const NodeIndex> neighbors(NodeIndex v) const { return adj_.at(v); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(NodeIndex u, NodeIndex v) const {
    if (u > v) std::swap(u, v);
    return edge_set_.count(detail::edge_key(u, v)) > 0;
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, NodeIndex, std::less<>> index_;
  std::vector<std::vector<NodeIndex>> adj_;
  std::vector<Edge> edges_;
  std::unordered_set<std::uint64_t> edge_set_;
};

// Collapses direction: u-v iff u->v or v->u. Node order is preserved.
inline UndirectedGraph undirected_view(const Digraph& g) {
  UndirectedGraph u;
  for (const auto& n : g.names()) u.add_node(n);
  for (auto [a, b] : g.edges()) u.add_edge(a, b);
  return u;
}

// Connected components as lists of node indices; each list ascending,
// components ordered by their smallest index.
inline std::vector<std::vector<NodeIndex>> connected_components(const UndirectedGraph& g) {
  std::vector<int> comp(g.node_count(), -1);
  std::vector<std::vector<NodeIndex>> out;
  for (NodeIndex s = 0; s < g.node_count(); ++s) {
    if (comp[s] >= 0) continue;
    int id = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<NodeIndex> stack{s};
    comp[s] = id;
    while (!stack.empty()) {
      NodeIndex v = stack.back();
      stack.pop_back();
      out.back().push_back(v);
      for (NodeIndex w : g.neighbors(v))
        if (comp[w] < 0) {
          comp[w] = id;
          stack.push_back(w);
        }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

}  // namespace dgtrace::graph
