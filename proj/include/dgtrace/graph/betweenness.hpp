#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dgtrace/graph/digraph.hpp"

namespace dgtrace::graph {

// Adjacency with edge ids, supporting edge removal (used by Girvan-Newman).
struct EdgeIndexedAdjacency {
  std::vector<std::vector<std::pair<NodeIndex, std::size_t>>> adj;  // (neighbor, edge id)
  std::vector<Edge> edges;
  std::vector<bool> alive;

  explicit EdgeIndexedAdjacency(const UndirectedGraph& g)
      : adj(g.node_count()), edges(g.edges()), alive(g.edge_count(), true) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      auto [u, v] = edges[e];
      adj[u].emplace_back(v, e);
      adj[v].emplace_back(u, e);
    }
  }
};

// Brandes accumulation of edge betweenness from each source in `sources`,
// over alive edges. Adds sigma_st(e)/sigma_st for ordered pairs into `out`;
// callers halve for undirected pairs.
inline void accumulate_edge_betweenness(const EdgeIndexedAdjacency& g, std::span<const NodeIndex> sources,
                                        std::vector<double>& out) {
  const std::size_t n = g.adj.size();
  std::vector<long> dist(n, -1);
  std::vector<double> sigma(n, 0.0), delta(n, 0.0);
  std::vector<std::vector<std::pair<NodeIndex, std::size_t>>> preds(n);
  std::vector<NodeIndex> order, queue;
  order.reserve(n);
  queue.reserve(n);
  for (NodeIndex s : sources) {
    for (NodeIndex v : order) {
      dist[v] = -1;
      sigma[v] = 0.0;
      delta[v] = 0.0;
      preds[v].clear();
    }
    order.clear();
    queue.clear();
    dist[s] = 0;
    sigma[s] = 1.0;
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      NodeIndex v = queue[head];
      order.push_back(v);
      for (auto [w, e] : g.adj[v]) {
        if (!g.alive[e]) continue;
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].emplace_back(v, e);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeIndex w = *it;
      for (auto [v, e] : preds[w]) {
        double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
        out[e] += c;
        delta[v] += c;
      }
    }
  }
  for (NodeIndex v : order) {
    dist[v] = -1;
    preds[v].clear();
  }
}

// Exact edge betweenness of an unweighted undirected graph: for each edge, the
// sum over unordered node pairs of the fraction of their shortest paths using
// it. Parallel to g.edges().
inline std::vector<double> edge_betweenness(const UndirectedGraph& g) {
  EdgeIndexedAdjacency a(g);
  std::vector<double> eb(g.edge_count(), 0.0);
  std::vector<NodeIndex> sources(g.node_count());
  for (NodeIndex v = 0; v < sources.size(); ++v) sources[v] = v;
  accumulate_edge_betweenness(a, sources, eb);
  for (auto& x : eb) x /= 2.0;
  return eb;
}

}  // namespace dgtrace::graph
