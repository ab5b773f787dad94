#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "dgtrace/graph/betweenness.hpp"
#include "dgtrace/graph/digraph.hpp"

namespace dgtrace::graph {

struct CommunityPartition {
  std::vector<std::vector<std::string>> communities;  // components with >= min_size nodes
  std::vector<std::vector<std::string>> components;   // every final component
  std::vector<std::pair<std::string, std::string>> removed_edges;
  std::size_t min_size = 3;
  bool no_edges = false;
};

namespace detail {

class GirvanNewman {
 public:
  explicit GirvanNewman(const UndirectedGraph& g) : g_(g), adj_(g), eb_(g.edge_count(), 0.0) {
    for (std::size_t e = 0; e < adj_.edges.size(); ++e) {
      auto [u, v] = adj_.edges[e];
      const auto& a = g.name(u);
      const auto& b = g.name(v);
      key_.push_back(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
    }
  }

  std::vector<std::vector<NodeIndex>> components() const {
    std::vector<int> comp(g_.node_count(), -1);
    std::vector<std::vector<NodeIndex>> out;
    for (NodeIndex s = 0; s < g_.node_count(); ++s) {
      if (comp[s] >= 0) continue;
      out.push_back(reach(s, comp, static_cast<int>(out.size())));
    }
    return out;
  }

  void recompute(const std::vector<NodeIndex>& component) {
    for (NodeIndex v : component)
      for (auto [w, e] : adj_.adj[v]) eb_[e] = 0.0;
    accumulate_edge_betweenness(adj_, component, eb_);
    for (NodeIndex v : component)
      for (auto [w, e] : adj_.adj[v])
        if (v < w) eb_[e] /= 2.0;
  }

  // Removes highest-betweenness edges inside `component` (ties: the
  // lexicographically smallest edge by endpoint names) until it splits.
  // Returns false if the component has no edges.
  bool split(const std::vector<NodeIndex>& component) {
    recompute(component);
    while (true) {
      std::size_t best = adj_.edges.size();
      double max_eb = -1.0;
      for (NodeIndex v : component)
        for (auto [w, e] : adj_.adj[v])
          if (adj_.alive[e] && v < w && eb_[e] > max_eb) max_eb = eb_[e];
      if (max_eb < 0) return false;
      const double tol = 1e-9 * std::max(1.0, max_eb);
      for (NodeIndex v : component)
        for (auto [w, e] : adj_.adj[v])
          if (adj_.alive[e] && v < w && eb_[e] >= max_eb - tol &&
              (best == adj_.edges.size() || key_[e] < key_[best]))
            best = e;
      adj_.alive[best] = false;
      removed_.push_back(key_[best]);
      auto [u, v] = adj_.edges[best];
      std::vector<int> comp(g_.node_count(), -1);
      auto part = reach(u, comp, 0);
      if (comp[v] < 0) return true;
      recompute(part);
    }
  }

  const std::vector<std::pair<std::string, std::string>>& removed() const { return removed_; }

  std::vector<NodeIndex> reach(NodeIndex s, std::vector<int>& comp, int id) const {
    std::vector<NodeIndex> out{s};
    comp[s] = id;
    for (std::size_t i = 0; i < out.size(); ++i)
      for (auto [w, e] : adj_.adj[out[i]])
        if (adj_.alive[e] && comp[w] < 0) {
          comp[w] = id;
          out.push_back(w);
        }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool has_alive_edge(const std::vector<NodeIndex>& component) const {
    for (NodeIndex v : component)
      for (auto [w, e] : adj_.adj[v])
        if (adj_.alive[e]) return true;
    return false;
  }

  // Component holding the globally highest-betweenness edge.
  std::vector<NodeIndex> global_target(const std::vector<std::vector<NodeIndex>>& comps) {
    std::size_t best_comp = comps.size();
    double best = -1.0;
    std::pair<std::string, std::string> best_key;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (!has_alive_edge(comps[c])) continue;
      recompute(comps[c]);
      for (NodeIndex v : comps[c])
        for (auto [w, e] : adj_.adj[v]) {
          if (!adj_.alive[e] || v > w) continue;
          const double tol = 1e-9 * std::max(1.0, std::max(best, eb_[e]));
          bool higher = eb_[e] > best + tol;
          bool tie = std::abs(eb_[e] - best) <= tol && key_[e] < best_key;
          if (higher || tie) {
            best = eb_[e];
            best_key = key_[e];
            best_comp = c;
          }
        }
    }
    return best_comp == comps.size() ? std::vector<NodeIndex>{} : comps[best_comp];
  }

 private:
  const UndirectedGraph& g_;
  EdgeIndexedAdjacency adj_;
  std::vector<double> eb_;
  std::vector<std::pair<std::string, std::string>> key_;
  std::vector<std::pair<std::string, std::string>> removed_;
};

}  // namespace detail

// Girvan-Newman community detection. One iteration removes the globally
// highest-betweenness edge (recomputing betweenness inside the affected
// component) until the number of components grows. Each further iteration
// splits every component once more. Components of at least `min_size` nodes
// are reported as communities, largest first.
inline CommunityPartition girvan_newman(const UndirectedGraph& g, std::size_t min_size = 3, int iterations = 1) {
  CommunityPartition p;
  p.min_size = min_size;
  detail::GirvanNewman gn(g);
  p.no_edges = g.edge_count() == 0;
  if (!p.no_edges && iterations > 0) {
    auto target = gn.global_target(gn.components());
    if (!target.empty()) gn.split(target);
    for (int it = 1; it < iterations; ++it) {
      bool any = false;
      for (const auto& c : gn.components())
        if (gn.has_alive_edge(c)) any = gn.split(c) || any;
      if (!any) break;
    }
  }
  p.removed_edges = gn.removed();
  for (const auto& c : gn.components()) {
    std::vector<std::string> names;
    for (NodeIndex v : c) names.push_back(g.name(v));
    std::sort(names.begin(), names.end());
    p.components.push_back(names);
  }
  std::sort(p.components.begin(), p.components.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a.front() < b.front();
  });
  for (const auto& c : p.components)
    if (c.size() >= min_size) p.communities.push_back(c);
  return p;
}

}  // namespace dgtrace::graph
