#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgtrace/error.hpp"
#include "dgtrace/graph/centrality.hpp"
#include "dgtrace/graph/community.hpp"
#include "dgtrace/graph/degree.hpp"
#include "dgtrace/graph/quotient.hpp"
#include "dgtrace/graph_io.hpp"
#include "dgtrace/metagraph.hpp"
#include "dgtrace/minifort/coverage.hpp"
#include "dgtrace/minifort/parser.hpp"
#include "dgtrace/minifort/symbols.hpp"
#include "dgtrace/refinement.hpp"
#include "dgtrace/selection/lasso.hpp"
#include "dgtrace/selection/select.hpp"
#include "dgtrace/slicer.hpp"
#include "dgtrace/synth.hpp"

namespace dgtrace::pipeline {

namespace fs = std::filesystem;

enum ExitCode : int { ok = 0, input_error = 2, empty_result = 3, not_converged = 4 };

// Output formats to write; empty means every format the command supports.
struct Formats {
  std::set<std::string> only;
  bool wants(const std::string& f) const { return only.empty() || only.count(f) > 0; }
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void ensure_dir(const fs::path& d) {
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw IoError("cannot create " + d.string() + ": " + ec.message());
}

inline MetaGraph read_graph(const fs::path& p) { return metagraph_from_json(read_file(p)); }

inline NameMap read_name_map(const fs::path& p) {
  NameMap m;
  try {
    auto j = nlohmann::json::parse(read_file(p));
    for (const auto& [k, v] : j.items()) m[k] = v.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError("name map: " + std::string(e.what()));
  }
  return m;
}

inline BugSpec read_bugs(const fs::path& p) {
  BugSpec b;
  try {
    auto j = nlohmann::json::parse(read_file(p));
    for (const auto& n : j.at("bugs")) b.bug_nodes.insert(n.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError("bugs file: " + std::string(e.what()));
  }
  if (b.bug_nodes.empty()) throw InputError("bugs file lists no nodes");
  return b;
}

// Variable names from a "rank,variable,score" file, best first.
inline std::vector<std::string> read_selection_csv(const fs::path& p, std::size_t top = 0) {
  std::istringstream is(read_file(p));
  std::string line;
  std::vector<std::string> out;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    if (header) {
      header = false;
      if (line.rfind("rank,variable", 0) != 0) throw InputError("selection CSV needs header 'rank,variable,score'");
      continue;
    }
    auto a = line.find(',');
    auto b = line.find(',', a + 1);
    if (a == std::string::npos || b == std::string::npos) throw InputError("selection CSV: malformed row '" + line + "'");
    out.push_back(line.substr(a + 1, b - a - 1));
    if (top && out.size() == top) break;
  }
  return out;
}

// --- parse -----------------------------------------------------------------

struct CorpusCounts {
  std::size_t modules = 0, subprograms = 0, statements = 0;
};

inline CorpusCounts counts_of(const minifort::SourceCorpus& c) {
  return {c.units.size(), c.subprogram_count(), c.statement_count()};
}

struct ParseOptions {
  fs::path corpus_dir;
  std::optional<fs::path> coverage;
};

struct LoadedCorpus {
  minifort::SourceCorpus corpus;  // after coverage filtering
  CorpusCounts before, after;
};

inline LoadedCorpus load(const ParseOptions& o) {
  LoadedCorpus l;
  minifort::SourceCorpus raw = minifort::load_corpus(o.corpus_dir);
  if (raw.units.empty()) throw InputError("no .mf90 files in " + o.corpus_dir.string());
  l.before = counts_of(raw);
  l.corpus = o.coverage ? minifort::apply_coverage(raw, minifort::read_coverage(*o.coverage)) : std::move(raw);
  l.after = counts_of(l.corpus);
  return l;
}

inline int cmd_parse(const ParseOptions& o, std::ostream& out) {
  LoadedCorpus l = load(o);
  auto line = [&](const char* what, std::size_t a, std::size_t b) {
    out << what << ": " << a;
    if (o.coverage) out << " → " << b;
    out << "\n";
  };
  line("modules", l.before.modules, l.after.modules);
  line("subprograms", l.before.subprograms, l.after.subprograms);
  line("statements", l.before.statements, l.after.statements);
  if (!o.coverage) out << "coverage: not applied\n";
  std::size_t errors = count_severity(l.corpus.diagnostics, Severity::error);
  std::size_t warnings = count_severity(l.corpus.diagnostics, Severity::warning);
  out << "diagnostics: " << errors << " errors, " << warnings << " warnings\n";
  write_diagnostics(out, l.corpus.diagnostics);
  return ok;
}

// --- graph -----------------------------------------------------------------

struct GraphOptions {
  ParseOptions parse;
  fs::path output_dir = ".";
  Formats formats;
};

inline MetaGraph build_graph(const ParseOptions& o) {
  LoadedCorpus l = load(o);
  minifort::SymbolTable t = minifort::resolve_uses(l.corpus);
  MetaGraph g = build_metagraph(l.corpus, t);
  g.diagnostics.insert(g.diagnostics.begin(), l.corpus.diagnostics.begin(), l.corpus.diagnostics.end());
  return g;
}

inline int cmd_graph(const GraphOptions& o, std::ostream& out) {
  MetaGraph g = build_graph(o.parse);
  ensure_dir(o.output_dir);
  if (o.formats.wants("json")) write_file(o.output_dir / "graph.json", to_json(g));
  if (o.formats.wants("dot")) write_file(o.output_dir / "graph.dot", to_dot(g));
  out << "nodes: " << g.node_count() << "\nedges: " << g.edge_count() << "\n";
  write_diagnostics(out, g.diagnostics);
  return ok;
}

// --- select ----------------------------------------------------------------

struct SelectOptions {
  fs::path ensemble_csv;
  std::string method = "median";  // raw | median | lasso
  std::size_t target_count = 5;
  std::size_t member_index = 0, run_index = 0;
  double rel_tol = 1e-12;
  fs::path output_dir = ".";
};

inline int cmd_select(const SelectOptions& o, std::ostream& out) {
  selection::EnsembleTable t = selection::read_ensemble_csv(o.ensemble_csv);
  selection::SelectionResult r;
  if (o.method == "raw")
    r = selection::raw_diff(t, o.member_index, o.run_index, o.rel_tol);
  else if (o.method == "median")
    r = selection::median_distance(t);
  else if (o.method == "lasso")
    r = selection::lasso_select(t, o.target_count);
  else
    throw InputError("unknown selection method '" + o.method + "'");
  ensure_dir(o.output_dir);
  write_file(o.output_dir / "selection.csv", selection::to_csv(r));
  out << "method: " << selection::to_string(r.method) << "\nselected: " << r.ranked.size() << "\n";
  if (r.lambda) out << "lambda: " << *r.lambda << (r.tuning_failed ? " (tuning failed)" : "") << "\n";
  write_diagnostics(out, r.warnings);
  return r.ranked.empty() ? empty_result : ok;
}

// --- slice -----------------------------------------------------------------

struct SliceOptions {
  fs::path graph;
  std::vector<std::string> targets;
  std::optional<fs::path> selection_csv;
  std::size_t selection_top = 0;  // 0 = all rows
  std::optional<fs::path> name_map;
  std::vector<std::string> scope_modules;
  fs::path output_dir = ".";
  Formats formats;
};

inline int cmd_slice(const SliceOptions& o, std::ostream& out) {
  MetaGraph g = read_graph(o.graph);
  SliceRequest req;
  req.targets.insert(o.targets.begin(), o.targets.end());
  if (o.selection_csv)
    for (auto& v : read_selection_csv(*o.selection_csv, o.selection_top)) req.targets.insert(v);
  if (!o.scope_modules.empty()) req.scope_filter = std::set<std::string>(o.scope_modules.begin(), o.scope_modules.end());
  NameMap names = o.name_map ? read_name_map(*o.name_map) : NameMap{};
  Diagnostics warnings;
  Slice s = backward_slice(g, req, names, &warnings);
  ensure_dir(o.output_dir);
  if (o.formats.wants("json")) write_file(o.output_dir / "slice.json", slice_to_json(s, g));
  if (o.formats.wants("dot")) write_file(o.output_dir / "slice.dot", to_dot(s.graph, &g, nullptr, "slice"));
  out << "terminals: " << s.terminals.size() << "\nnodes: " << s.node_count()
      << "\nedges: " << s.graph.edge_count() << "\n";
  write_diagnostics(out, warnings);
  return s.node_count() == 0 ? empty_result : ok;
}

// --- communities -------------------------------------------------------------

struct CommunityOptions {
  fs::path graph;  // graph or slice JSON
  int min_size = 3;
  int gn_iterations = 1;
  fs::path output_dir = ".";
  Formats formats;
};

inline int cmd_communities(const CommunityOptions& o, std::ostream& out) {
  MetaGraph g = read_graph(o.graph);
  if (g.node_count() == 0) throw EmptyGraph("graph has no nodes");
  auto p = graph::girvan_newman(graph::undirected_view(g.digraph), static_cast<std::size_t>(o.min_size),
                                o.gn_iterations);
  ensure_dir(o.output_dir);
  if (o.formats.wants("json")) {
    nlohmann::ordered_json j;
    j["min_size"] = p.min_size;
    j["communities"] = p.communities;
    j["removed_edges"] = p.removed_edges;
    write_file(o.output_dir / "communities.json", j.dump(1) + "\n");
  }
  if (o.formats.wants("dot")) {
    DotStyle style;
    for (std::size_t k = 0; k < p.communities.size(); ++k)
      for (const auto& n : p.communities[k]) style.community[n] = static_cast<int>(k);
    write_file(o.output_dir / "communities.dot", to_dot(g.digraph, &g, &style, "communities"));
  }
  out << "communities: " << p.communities.size() << "\n";
  for (const auto& c : p.communities) out << "  size " << c.size() << "\n";
  if (p.no_edges) out << "WARNING graph has no edges\n";
  return p.communities.empty() ? empty_result : ok;
}

// --- centrality --------------------------------------------------------------

inline std::string rankings_csv(const graph::CentralityRanking& r, std::size_t top = 0) {
  std::ostringstream os;
  os.precision(17);
  os << "node,score,rank\n";
  for (std::size_t i = 0; i < r.ordering.size() && (top == 0 || i < top); ++i)
    os << r.ordering[i] << ',' << r.scores.at(r.ordering[i]) << ',' << i + 1 << '\n';
  return os.str();
}

// eigen_in | eigen_out | nonbacktracking_in | nonbacktracking_out. A
// nilpotent non-backtracking matrix falls back to eigenvector centrality.
inline graph::CentralityRanking centrality_by_name(const graph::Digraph& g, const std::string& method,
                                                   Diagnostics& warnings) {
  if (method == "eigen_in") return graph::eigen_in_centrality(g);
  if (method == "eigen_out") return graph::eigen_out_centrality(g);
  if (method == "nonbacktracking_in" || method == "nonbacktracking_out") {
    bool in = method == "nonbacktracking_in";
    try {
      return graph::nonbacktracking_centrality(g, in);
    } catch (const ZeroSpectralRadius& e) {
      warnings.push_back({Severity::warning, "", 0, std::string(e.what()) + "; using eigenvector centrality"});
      return in ? graph::eigen_in_centrality(g) : graph::eigen_out_centrality(g);
    }
  }
  throw InputError("unknown centrality method '" + method + "'");
}

struct CentralityOptions {
  fs::path graph;
  std::string method = "eigen_in";
  std::size_t top = 0;
  fs::path output_dir = ".";
};

inline int cmd_centrality(const CentralityOptions& o, std::ostream& out) {
  MetaGraph g = read_graph(o.graph);
  if (g.node_count() == 0) throw EmptyGraph("graph has no nodes");
  Diagnostics warnings;
  auto r = centrality_by_name(g.digraph, o.method, warnings);
  ensure_dir(o.output_dir);
  write_file(o.output_dir / "rankings.csv", rankings_csv(r, o.top));
  out << "method: " << graph::to_string(r.method) << "\niterations: " << r.iterations
      << "\nconverged: " << (r.converged ? "yes" : "no") << "\n";
  write_diagnostics(out, warnings);
  return r.converged ? ok : not_converged;
}

// --- refine ----------------------------------------------------------------

struct RefineOptions {
  fs::path slice;
  fs::path graph;  // full graph, for reachability
  fs::path bugs;
  RefinementConfig config;
  bool export_dot = true;
  fs::path output_dir = ".";
};

inline int cmd_refine(const RefineOptions& o, std::ostream& out) {
  MetaGraph g = read_graph(o.graph);
  Slice s = slice_from_json(read_file(o.slice));
  BugSpec bugs = read_bugs(o.bugs);
  std::vector<std::string> dots;
  RefinementState st = run_refinement(s, o.config, bugs, g, o.export_dot ? &dots : nullptr);
  ensure_dir(o.output_dir);
  write_file(o.output_dir / "report.json", report_to_json(st, o.config));
  for (std::size_t k = 0; k < dots.size(); ++k)
    write_file(o.output_dir / ("iter_" + std::to_string(k + 1) + ".dot"), dots[k]);
  for (const auto& r : st.history)
    out << "iteration " << r.iteration << ": " << (r.branch ? *r.branch : std::string("-")) << " " << r.nodes_before
        << " -> " << r.nodes_after << " (" << r.communities.size() << " communities, " << r.differing.size() << "/"
        << r.sampled.size() << " differing) " << to_string(r.status) << "\n";
  out << "status: " << to_string(st.status) << "\ncandidates: " << st.current.node_count() << "\n";
  return ok;
}

// --- quotient --------------------------------------------------------------

struct QuotientOptions {
  fs::path graph;
  std::size_t top_k = 50;
  std::string method = "eigen_in";
  fs::path output_dir = ".";
  Formats formats;
};

inline int cmd_quotient(const QuotientOptions& o, std::ostream& out) {
  MetaGraph g = read_graph(o.graph);
  if (g.node_count() == 0) throw EmptyGraph("graph has no nodes");
  auto q = graph::quotient_by_module(g);
  Diagnostics warnings;
  if (q.graph.edge_count() == 0)
    warnings.push_back({Severity::warning, "", 0, "quotient graph has no edges; scores are uniform"});
  auto r = centrality_by_name(q.graph, o.method, warnings);
  ensure_dir(o.output_dir);
  if (o.formats.wants("csv")) write_file(o.output_dir / "quotient_ranking.csv", rankings_csv(r, o.top_k));
  if (o.formats.wants("dot")) write_file(o.output_dir / "quotient.dot", to_dot(q.graph, nullptr, nullptr, "quotient"));
  out << "modules: " << q.graph.node_count() << "\nmodule edges: " << q.graph.edge_count() << "\n";
  for (std::size_t i = 0; i < r.ordering.size() && i < o.top_k; ++i) out << "  " << i + 1 << " " << r.ordering[i] << "\n";
  write_diagnostics(out, warnings);
  return r.converged ? ok : not_converged;
}

// --- degree-dist -------------------------------------------------------------

struct DegreeOptions {
  fs::path graph;
  fs::path output_dir = ".";
};

inline int cmd_degree_dist(const DegreeOptions& o, std::ostream& out) {
  MetaGraph g = read_graph(o.graph);
  auto h = graph::degree_distribution(g.digraph);
  std::ostringstream csv;
  csv << "degree,count\n";
  for (const auto& [d, c] : h.counts) csv << d << ',' << c << '\n';
  ensure_dir(o.output_dir);
  write_file(o.output_dir / "degree.csv", csv.str());
  out << "nodes: " << h.total() << "\ndistinct degrees: " << h.counts.size() << "\n";
  if (h.fitted_exponent)
    out << "power-law exponent: " << *h.fitted_exponent << "\n";
  else
    out << "WARNING fewer than 3 distinct degrees; no power-law fit\n";
  return ok;
}

// --- synth -----------------------------------------------------------------

struct SynthCommandOptions {
  std::uint64_t seed = 1;
  std::string target = "omega";
  fs::path output_dir = ".";
};

// Writes a seeded corpus into output_dir/corpus plus bugs.json naming one
// randomly chosen node of the target's slice.
inline int cmd_synth(const SynthCommandOptions& o, std::ostream& out) {
  fs::path dir = o.output_dir / "corpus";
  ensure_dir(dir);
  for (const auto& f : synth::generate_corpus(o.seed)) write_file(dir / f.name, f.text);
  MetaGraph g = build_graph({dir, std::nullopt});
  SliceRequest req;
  req.targets = {o.target};
  Slice s = backward_slice(g, req);
  std::string bug = synth::pick_bug(s, o.seed);
  nlohmann::ordered_json j;
  j["bugs"] = {bug};
  write_file(o.output_dir / "bugs.json", j.dump(1) + "\n");
  out << "corpus: " << dir.string() << "\nnodes: " << g.node_count() << "\nslice: " << s.node_count()
      << "\nbug: " << bug << "\n";
  return ok;
}

// Error class to exit code; unknown errors are input errors.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const EmptySlice*>(&e) || dynamic_cast<const EmptyGraph*>(&e)) return empty_result;
  return input_error;
}

}  // namespace dgtrace::pipeline
