#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgtrace/error.hpp"
#include "dgtrace/graph/centrality.hpp"
#include "dgtrace/graph/community.hpp"
#include "dgtrace/graph/digraph.hpp"
#include "dgtrace/graph_io.hpp"
#include "dgtrace/metagraph.hpp"
#include "dgtrace/slicer.hpp"

namespace dgtrace {

struct RefinementConfig {
  int m = 10;
  int min_community = 3;
  int stop_size = 30;
  int max_iterations = 20;
  int gn_iterations = 1;

  void validate() const {
    if (m < 1 || min_community < 1 || stop_size < 1 || max_iterations < 1 || gn_iterations < 1)
      throw InputError("refinement parameters must be positive");
  }
};

struct BugSpec {
  std::set<std::string> bug_nodes;
};

enum class RefinementStatus { running, converged_small, bug_instrumented, stalled, disconnected_exhausted };

inline std::string to_string(RefinementStatus s) {
  switch (s) {
    case RefinementStatus::running: return "running";
    case RefinementStatus::converged_small: return "converged_small";
    case RefinementStatus::bug_instrumented: return "bug_instrumented";
    case RefinementStatus::stalled: return "stalled";
    case RefinementStatus::disconnected_exhausted: return "disconnected_exhausted";
  }
  return "?";
}

struct IterationRecord {
  int iteration = 0;
  std::vector<std::vector<std::string>> communities;
  std::vector<std::string> sampled;
  std::vector<std::string> differing;
  std::optional<std::string> branch;  // "8a" | "8b"; empty when no community was found
  std::size_t nodes_before = 0;
  std::size_t nodes_after = 0;
  RefinementStatus status = RefinementStatus::running;
};

struct RefinementState {
  int iteration = 0;
  Slice current;
  std::set<std::string> sampled;
  std::set<std::string> differing;
  std::vector<IterationRecord> history;
  RefinementStatus status = RefinementStatus::running;

  std::vector<std::string> candidates() const { return {current.path_nodes.begin(), current.path_nodes.end()}; }
};

// Candidates a bug can influence: those reachable from some bug node along
// directed paths of the full graph. A bug node reaches itself.
inline std::set<std::string> simulate_sampling(const std::set<std::string>& candidates, const BugSpec& bugs,
                                               const MetaGraph& g) {
  std::vector<bool> seen(g.node_count(), false);
  std::deque<NodeIndex> queue;
  for (const auto& b : bugs.bug_nodes)
    if (auto v = g.find(b); v && !seen[*v]) {
      seen[*v] = true;
      queue.push_back(*v);
    }
  while (!queue.empty()) {
    NodeIndex v = queue.front();
    queue.pop_front();
    for (NodeIndex w : g.digraph.successors(v))
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
  }
  std::set<std::string> out;
  for (const auto& c : candidates) {
    auto v = g.find(c);
    if (!v) throw InputError("sampled node '" + c + "' is not in the graph");
    if (seen[*v]) out.insert(c);
  }
  return out;
}

namespace detail {

inline std::set<std::string> names_where(const graph::Digraph& d, const std::vector<bool>& keep, bool value) {
  std::set<std::string> out;
  for (NodeIndex v = 0; v < d.node_count(); ++v)
    if (keep[v] == value) out.insert(d.name(v));
  return out;
}

inline std::vector<NodeIndex> indices_of(const graph::Digraph& d, const std::set<std::string>& names) {
  std::vector<NodeIndex> out;
  for (const auto& n : names)
    if (auto v = d.find(n)) out.push_back(*v);
  return out;
}

}  // namespace detail

// Per-community top-m nodes by eigenvector in-centrality on the community's
// induced subgraph.
inline std::vector<std::vector<std::string>> top_central(const graph::Digraph& current,
                                                         const std::vector<std::vector<std::string>>& communities,
                                                         int m) {
  std::vector<std::vector<std::string>> out;
  for (const auto& c : communities) {
    std::vector<NodeIndex> idx;
    for (const auto& n : c) idx.push_back(*current.find(n));
    graph::Digraph sub = current.induced(idx);
    out.push_back(graph::eigen_in_centrality(sub).top(static_cast<std::size_t>(m)));
  }
  return out;
}

// One pass of community detection, per-community centrality ranking,
// simulated sampling and contraction. DOT of the pre-contraction subgraph is
// stored in *dot when requested.
inline RefinementState refine_step(RefinementState state, const RefinementConfig& cfg, const BugSpec& bugs,
                                   const MetaGraph& g, std::string* dot = nullptr) {
  const graph::Digraph& cur = state.current.graph;
  IterationRecord rec;
  rec.iteration = ++state.iteration;
  rec.nodes_before = cur.node_count();

  auto partition = graph::girvan_newman(graph::undirected_view(cur), static_cast<std::size_t>(cfg.min_community),
                                        cfg.gn_iterations);
  rec.communities = partition.communities;
  state.sampled.clear();
  state.differing.clear();

  if (rec.communities.empty()) {
    rec.nodes_after = rec.nodes_before;
    rec.status = state.status = RefinementStatus::disconnected_exhausted;
    if (dot) *dot = to_dot(cur, &g, nullptr, "iter_" + std::to_string(rec.iteration));
    state.history.push_back(std::move(rec));
    return state;
  }

  DotStyle style;
  for (std::size_t k = 0; k < rec.communities.size(); ++k)
    for (const auto& n : rec.communities[k]) style.community[n] = static_cast<int>(k);
  for (const auto& top : top_central(cur, rec.communities, cfg.m)) state.sampled.insert(top.begin(), top.end());
  style.highlighted = state.sampled;
  if (dot) *dot = to_dot(cur, &g, &style, "iter_" + std::to_string(rec.iteration));

  state.differing = simulate_sampling(state.sampled, bugs, g);
  std::set<std::string> next;
  if (state.differing.empty()) {
    rec.branch = "8a";
    auto idx = detail::indices_of(cur, state.sampled);
    next = detail::names_where(cur, shortest_path_nodes(cur, idx), false);
  } else {
    rec.branch = "8b";
    auto idx = detail::indices_of(cur, state.differing);
    next = detail::names_where(cur, shortest_path_nodes(cur, idx), true);
  }

  bool unchanged = next == state.current.path_nodes;
  bool instrumented = std::any_of(state.sampled.begin(), state.sampled.end(),
                                  [&](const std::string& s) { return bugs.bug_nodes.count(s) > 0; });
  std::vector<NodeIndex> keep = detail::indices_of(cur, next);
  std::set<std::string> terminals;
  for (const auto& t : state.current.terminals)
    if (next.count(t)) terminals.insert(t);
  state.current.graph = cur.induced(keep);
  state.current.path_nodes = next;
  state.current.terminals = terminals;
  state.current.edge_traversed.assign(state.current.graph.edge_count(), false);

  if (instrumented)
    state.status = RefinementStatus::bug_instrumented;
  else if (next.size() <= static_cast<std::size_t>(cfg.stop_size))
    state.status = RefinementStatus::converged_small;
  else if (unchanged)
    state.status = RefinementStatus::stalled;
  else
    state.status = RefinementStatus::running;

  rec.sampled.assign(state.sampled.begin(), state.sampled.end());
  rec.differing.assign(state.differing.begin(), state.differing.end());
  rec.nodes_after = next.size();
  rec.status = state.status;
  state.history.push_back(std::move(rec));
  return state;
}

// Repeats refine_step until a terminal status or max_iterations; always runs
// at least one step. Per-iteration DOT is appended to *dots when requested.
inline RefinementState run_refinement(const Slice& slice, const RefinementConfig& cfg, const BugSpec& bugs,
                                      const MetaGraph& g, std::vector<std::string>* dots = nullptr) {
  cfg.validate();
  if (slice.node_count() == 0) throw EmptySlice("refinement needs a nonempty slice");
  if (bugs.bug_nodes.empty()) throw InputError("no bug nodes given");
  for (const auto& b : bugs.bug_nodes)
    if (!g.find(b)) throw InputError("bug node '" + b + "' is not in the graph");

  RefinementState state;
  state.current = slice;
  state.current.path_nodes.clear();
  for (const auto& n : slice.graph.names()) state.current.path_nodes.insert(n);
  do {
    std::string dot;
    state = refine_step(std::move(state), cfg, bugs, g, dots ? &dot : nullptr);
    if (dots) dots->push_back(std::move(dot));
  } while (state.status == RefinementStatus::running && state.iteration < cfg.max_iterations);
  return state;
}

inline std::string report_to_json(const RefinementState& s, const RefinementConfig& cfg) {
  nlohmann::ordered_json j;
  j["config"] = {{"m", cfg.m},
                 {"min_community", cfg.min_community},
                 {"stop_size", cfg.stop_size},
                 {"max_iterations", cfg.max_iterations},
                 {"gn_iterations", cfg.gn_iterations}};
  auto its = nlohmann::ordered_json::array();
  for (const auto& r : s.history) {
    nlohmann::ordered_json it;
    it["iteration"] = r.iteration;
    it["communities"] = r.communities;
    it["sampled"] = r.sampled;
    it["differing"] = r.differing;
    if (r.branch)
      it["branch"] = *r.branch;
    else
      it["branch"] = nullptr;
    it["nodes_before"] = r.nodes_before;
    it["nodes_after"] = r.nodes_after;
    it["status"] = to_string(r.status);
    its.push_back(std::move(it));
  }
  j["iterations"] = std::move(its);
  j["status"] = to_string(s.status);
  j["candidates"] = s.candidates();
  return j.dump(1) + "\n";
}

}  // namespace dgtrace
