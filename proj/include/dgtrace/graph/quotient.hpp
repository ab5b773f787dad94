#pragma once

#include <map>
#include <set>
#include <string>

#include "dgtrace/graph/digraph.hpp"
#include "dgtrace/metagraph.hpp"

namespace dgtrace::graph {

struct QuotientGraph {
  Digraph graph;  // nodes are module names
  std::map<std::string, std::string> class_map;  // node id -> module
};

// Contracts every module to one node. Edges inside a module vanish; parallel
// edges between modules collapse.
inline QuotientGraph quotient_by_module(const MetaGraph& g) {
  QuotientGraph q;
  std::set<std::string> modules;
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    q.class_map[g.id(v)] = g.meta_of(v).module;
    modules.insert(g.meta_of(v).module);
  }
  for (const auto& m : modules) q.graph.add_node(m);
  for (auto [u, v] : g.digraph.edges()) {
    const auto& mu = g.meta_of(u).module;
    const auto& mv = g.meta_of(v).module;
    if (mu != mv) q.graph.add_edge(mu, mv);
  }
  return q;
}

}  // namespace dgtrace::graph
