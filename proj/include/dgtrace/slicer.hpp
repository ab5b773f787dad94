#pragma once

#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dgtrace/diagnostics.hpp"
#include "dgtrace/error.hpp"
#include "dgtrace/graph/digraph.hpp"
#include "dgtrace/metagraph.hpp"

namespace dgtrace {

// Output variable name -> internal canonical name (e.g. "flds" -> "flwds").
using NameMap = std::map<std::string, std::string>;

struct SliceRequest {
  std::set<std::string> targets;  // canonical names
  std::optional<std::set<std::string>> scope_filter;  // module names
};

struct Slice {
  graph::Digraph graph;               // induced subgraph, node names are node ids
  std::set<std::string> terminals;
  std::set<std::string> path_nodes;   // union of shortest-path nodes, before scope filtering
  std::vector<bool> edge_traversed;   // parallel to graph.edges(); nothing sets it yet

  bool contains(const std::string& id) const { return graph.contains(id); }
  std::size_t node_count() const { return graph.node_count(); }
};

// Node ids whose canonical name is `name` (after applying the name map).
inline std::set<std::string> terminal_nodes(const MetaGraph& g, const std::string& name,
                                            const NameMap& names = {}, Diagnostics* warnings = nullptr) {
  std::string internal = name;
  if (auto it = names.find(name); it != names.end()) internal = it->second;
  auto it = g.name_index.find(internal);
  if (it == g.name_index.end() || it->second.empty()) {
    if (warnings)
      warnings->push_back({Severity::warning, "", 0, "no node has canonical name '" + internal + "'"});
    return {};
  }
  return it->second;
}

// Marks every node lying on a shortest directed path that ends on one of
// `terminals`. Reverse BFS from the terminals gives dist(v); v is kept when it
// is a terminal or has a successor one step closer.
inline std::vector<bool> shortest_path_nodes(const graph::Digraph& g, std::span<const NodeIndex> terminals) {
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.node_count(), inf);
  std::deque<NodeIndex> queue;
  for (NodeIndex t : terminals)
    if (dist.at(t) == inf) {
      dist[t] = 0;
      queue.push_back(t);
    }
  while (!queue.empty()) {
    NodeIndex v = queue.front();
    queue.pop_front();
    for (NodeIndex u : g.predecessors(v))
      if (dist[u] == inf) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
  }
  std::vector<bool> keep(g.node_count(), false);
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    if (dist[v] == 0) {
      keep[v] = true;
      continue;
    }
    if (dist[v] == inf) continue;
    for (NodeIndex w : g.successors(v))
      if (dist[w] + 1 == dist[v]) {
        keep[v] = true;
        break;
      }
  }
  return keep;
}

inline Slice induce(const MetaGraph& g, const std::set<std::string>& nodes) {
  std::vector<bool> keep(g.node_count(), false);
  for (const auto& id : nodes) {
    auto v = g.find(id);
    if (!v) throw InputError("induce: unknown node '" + id + "'");
    keep[*v] = true;
  }
  Slice s;
  s.graph = g.digraph.induced(keep);
  s.path_nodes = nodes;
  s.edge_traversed.assign(s.graph.edge_count(), false);
  return s;
}

// Hybrid backward slice: union of all shortest paths into nodes whose
// canonical names match the targets, induced on the metagraph.
inline Slice backward_slice(const MetaGraph& g, const SliceRequest& req, const NameMap& names = {},
                            Diagnostics* warnings = nullptr) {
  if (req.targets.empty()) throw InputError("slice request without targets");
  std::set<std::string> terminals;
  for (const auto& t : req.targets) {
    auto found = terminal_nodes(g, t, names, warnings);
    terminals.insert(found.begin(), found.end());
  }
  if (terminals.empty()) throw EmptySlice("no node matches any slice target");

  std::vector<NodeIndex> term_idx;
  for (const auto& id : terminals) term_idx.push_back(*g.find(id));
  std::vector<bool> keep = shortest_path_nodes(g.digraph, term_idx);

  std::set<std::string> path_nodes;
  for (NodeIndex v = 0; v < g.node_count(); ++v)
    if (keep[v]) path_nodes.insert(g.id(v));

  if (req.scope_filter) {
    for (NodeIndex v = 0; v < g.node_count(); ++v)
      if (keep[v] && !req.scope_filter->count(g.meta_of(v).module)) keep[v] = false;
  }
  Slice s;
  s.graph = g.digraph.induced(keep);
  s.path_nodes = std::move(path_nodes);
  for (const auto& t : terminals)
    if (s.graph.contains(t)) s.terminals.insert(t);
  s.edge_traversed.assign(s.graph.edge_count(), false);
  return s;
}

}  // namespace dgtrace
