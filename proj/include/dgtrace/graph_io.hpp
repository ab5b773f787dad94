#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgtrace/error.hpp"
#include "dgtrace/metagraph.hpp"
#include "dgtrace/slicer.hpp"

namespace dgtrace {

namespace detail {

inline bool is_plain_dot_id(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

inline std::string dot_id(const std::string& s) {
  if (is_plain_dot_id(s)) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c;
  }
  return q + "\"";
}

inline const NodeMeta* meta_for(const MetaGraph* g, const std::string& id) {
  if (!g) return nullptr;
  auto v = g->find(id);
  return v ? &g->meta_of(*v) : nullptr;
}

}  // namespace detail

// Optional per-node styling for DOT export.
struct DotStyle {
  std::map<std::string, int> community;  // node id -> community index
  std::set<std::string> highlighted;     // drawn larger (e.g. top-m central nodes)
};

// DOT with nodes and edges in lexicographic order. Node labels are canonical
// names when metadata is available.
inline std::string to_dot(const graph::Digraph& dg, const MetaGraph* meta = nullptr,
                          const DotStyle* style = nullptr, const std::string& graph_name = "metagraph") {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream os;
  os << "digraph " << graph_name << " {\n";
  for (NodeIndex v : dg.sorted_by_name()) {
    const std::string& id = dg.name(v);
    os << "  " << detail::dot_id(id);
    std::vector<std::string> attrs;
    if (const NodeMeta* m = detail::meta_for(meta, id)) {
      attrs.push_back("label=\"" + m->canonical_name + "\"");
      attrs.push_back("module=\"" + m->module + "\"");
    }
    if (style) {
      if (auto it = style->community.find(id); it != style->community.end()) {
        attrs.push_back("style=filled");
        attrs.push_back(std::string("fillcolor=\"") + palette[it->second % 10] + "\"");
        attrs.push_back("community=" + std::to_string(it->second));
      }
      if (style->highlighted.count(id)) attrs.push_back("width=1.2, height=0.8, penwidth=2");
    }
    if (!attrs.empty()) {
      os << " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) os << (i ? ", " : "") << attrs[i];
      os << ']';
    }
    os << ";\n";
  }
  for (const auto& [u, v] : dg.named_edges()) os << "  " << detail::dot_id(u) << " -> " << detail::dot_id(v) << ";\n";
  os << "}\n";
  return os.str();
}

inline std::string to_dot(const MetaGraph& g) { return to_dot(g.digraph, &g); }

namespace detail {

inline nlohmann::ordered_json nodes_json(const graph::Digraph& dg, const MetaGraph* meta) {
  auto nodes = nlohmann::ordered_json::array();
  for (NodeIndex v : dg.sorted_by_name()) {
    const std::string& id = dg.name(v);
    nlohmann::ordered_json n;
    n["id"] = id;
    const NodeMeta* m = meta_for(meta, id);
    n["canonical"] = m ? m->canonical_name : id.substr(0, id.find("__"));
    n["module"] = m ? m->module : std::string();
    if (m && m->subprogram)
      n["subprogram"] = *m->subprogram;
    else
      n["subprogram"] = nullptr;
    n["lines"] = m ? std::vector<int>(m->lines.begin(), m->lines.end()) : std::vector<int>{};
    nodes.push_back(std::move(n));
  }
  return nodes;
}

inline nlohmann::ordered_json edges_json(const graph::Digraph& dg) {
  auto edges = nlohmann::ordered_json::array();
  for (const auto& [u, v] : dg.named_edges()) edges.push_back({u, v});
  return edges;
}

}  // namespace detail

// Graph JSON: {"nodes":[{"id","canonical","module","subprogram","lines"}],"edges":[[u,v]]}
inline std::string to_json(const MetaGraph& g) {
  nlohmann::ordered_json j;
  j["nodes"] = detail::nodes_json(g.digraph, &g);
  j["edges"] = detail::edges_json(g.digraph);
  return j.dump(1) + "\n";
}

// Slice JSON: graph JSON of the induced subgraph plus "terminals".
inline std::string slice_to_json(const Slice& s, const MetaGraph& g) {
  nlohmann::ordered_json j;
  j["nodes"] = detail::nodes_json(s.graph, &g);
  j["edges"] = detail::edges_json(s.graph);
  j["terminals"] = std::vector<std::string>(s.terminals.begin(), s.terminals.end());
  return j.dump(1) + "\n";
}

inline MetaGraph metagraph_from_json(const std::string& text) {
  MetaGraph g;
  try {
    auto j = nlohmann::json::parse(text);
    for (const auto& n : j.at("nodes")) {
      NodeMeta m;
      m.canonical_name = n.at("canonical").get<std::string>();
      m.module = n.at("module").get<std::string>();
      if (n.contains("subprogram") && !n.at("subprogram").is_null()) m.subprogram = n.at("subprogram").get<std::string>();
      if (n.contains("lines"))
        for (int l : n.at("lines")) m.lines.insert(l);
      g.add_node(n.at("id").get<std::string>(), std::move(m));
    }
    for (const auto& e : j.at("edges")) {
      auto u = g.find(e.at(0).get<std::string>());
      auto v = g.find(e.at(1).get<std::string>());
      if (!u || !v) throw InputError("graph JSON: edge endpoint is not a node");
      g.add_edge(*u, *v);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
  return g;
}

// Reads a slice file back; node metadata comes from the same file.
inline Slice slice_from_json(const std::string& text) {
  MetaGraph g = metagraph_from_json(text);
  Slice s;
  s.graph = g.digraph;
  for (const auto& n : s.graph.names()) s.path_nodes.insert(n);
  try {
    auto j = nlohmann::json::parse(text);
    if (j.contains("terminals"))
      for (const auto& t : j.at("terminals")) s.terminals.insert(t.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("slice JSON: ") + e.what());
  }
  s.edge_traversed.assign(s.graph.edge_count(), false);
  return s;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << content;
  if (!out) throw IoError("write failed: " + p.string());
}

}  // namespace dgtrace
