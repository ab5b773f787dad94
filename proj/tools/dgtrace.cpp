#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dgtrace/pipeline.hpp"

namespace pl = dgtrace::pipeline;

int main(int argc, char** argv) {
  CLI::App app{"dgtrace: localize statistical discrepancies through variable dependency graphs"};
  app.require_subcommand(1);

  std::string output_dir = ".";
  std::uint64_t seed = 1;
  std::vector<std::string> formats;
  app.add_option("--output-dir,-o", output_dir, "Directory for output files")->capture_default_str();
  app.add_option("--seed", seed, "Seed for the fixture generator")->capture_default_str();
  app.add_option("--format", formats, "Restrict outputs to these formats")
      ->check(CLI::IsMember({"json", "dot", "csv"}));

  std::string corpus, coverage;
  auto add_corpus = [&](CLI::App* c) {
    c->add_option("corpus", corpus, "Directory of .mf90 sources")->required();
    c->add_option("--coverage", coverage, "Coverage report JSON");
  };

  auto* parse = app.add_subcommand("parse", "Parse a corpus and print counts before and after coverage filtering");
  add_corpus(parse);

  auto* graph = app.add_subcommand("graph", "Compile a corpus into graph.json and graph.dot");
  add_corpus(graph);

  pl::SelectOptions sel;
  std::string ensemble;
  auto* select = app.add_subcommand("select", "Rank output variables by discrepancy");
  select->add_option("ensemble", ensemble, "Ensemble CSV (variable,role,values...)")->required();
  select->add_option("--method", sel.method, "raw | median | lasso")
      ->check(CLI::IsMember({"raw", "median", "lasso"}))
      ->capture_default_str();
  select->add_option("--target-count", sel.target_count, "Lasso target variable count")->capture_default_str();
  select->add_option("--member", sel.member_index, "Ensemble member for raw")->capture_default_str();
  select->add_option("--run", sel.run_index, "Experimental run for raw")->capture_default_str();
  select->add_option("--rel-tol", sel.rel_tol, "Relative tolerance for raw")->capture_default_str();

  pl::SliceOptions sl;
  std::string graph_path, selection_csv, name_map;
  auto* slice = app.add_subcommand("slice", "Backward slice of a graph onto target variables");
  slice->add_option("graph", graph_path, "graph.json")->required();
  slice->add_option("--target,-t", sl.targets, "Target canonical or output name");
  slice->add_option("--selection", selection_csv, "selection.csv whose variables become targets");
  slice->add_option("--top", sl.selection_top, "Use only the first N selected variables");
  slice->add_option("--name-map", name_map, "JSON mapping output names to internal names");
  slice->add_option("--scope", sl.scope_modules, "Keep only nodes of these modules");

  pl::CommunityOptions co;
  auto* communities = app.add_subcommand("communities", "Girvan-Newman communities of a graph or slice");
  communities->add_option("graph", graph_path, "graph.json or slice.json")->required();
  communities->add_option("--min-size", co.min_size, "Smallest reported community")->capture_default_str();
  communities->add_option("--gn-iterations", co.gn_iterations, "Girvan-Newman splits")->capture_default_str();

  pl::CentralityOptions ce;
  auto* centrality = app.add_subcommand("centrality", "Rank nodes by centrality");
  centrality->add_option("graph", graph_path, "graph.json or slice.json")->required();
  centrality->add_option("--method", ce.method, "eigen_in | eigen_out | nonbacktracking_in | nonbacktracking_out")
      ->check(CLI::IsMember({"eigen_in", "eigen_out", "nonbacktracking_in", "nonbacktracking_out"}))
      ->capture_default_str();
  centrality->add_option("--top", ce.top, "Write only the first N rows");

  pl::RefineOptions re;
  std::string slice_path, bugs;
  bool no_dot = false;
  auto* refine = app.add_subcommand("refine", "Iteratively shrink a slice towards the bug sources");
  refine->add_option("slice", slice_path, "slice.json")->required();
  refine->add_option("--graph", graph_path, "Full graph.json used for reachability")->required();
  refine->add_option("--bugs", bugs, "JSON {\"bugs\": [node ids]}")->required();
  refine->add_option("--m", re.config.m, "Nodes sampled per community")->capture_default_str();
  refine->add_option("--min-community", re.config.min_community, "Smallest sampled community")->capture_default_str();
  refine->add_option("--stop-size", re.config.stop_size, "Stop once the subgraph is this small")->capture_default_str();
  refine->add_option("--max-iterations", re.config.max_iterations, "Iteration cap")->capture_default_str();
  refine->add_option("--gn-iterations", re.config.gn_iterations, "Girvan-Newman splits per step")->capture_default_str();
  refine->add_flag("--no-dot", no_dot, "Skip per-iteration DOT files");

  pl::QuotientOptions qu;
  auto* quotient = app.add_subcommand("quotient", "Rank modules on the module quotient graph");
  quotient->add_option("graph", graph_path, "graph.json")->required();
  quotient->add_option("--top-k", qu.top_k, "Modules to list")->capture_default_str();
  quotient->add_option("--method", qu.method, "Centrality method")
      ->check(CLI::IsMember({"eigen_in", "eigen_out", "nonbacktracking_in", "nonbacktracking_out"}))
      ->capture_default_str();

  auto* degree = app.add_subcommand("degree-dist", "Degree histogram and power-law exponent");
  degree->add_option("graph", graph_path, "graph.json")->required();

  std::string synth_target = "omega";
  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic corpus and a bug file");
  synth->add_option("--target", synth_target, "Slice target used to place the bug")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : pl::input_error;
  }

  pl::Formats fmt;
  fmt.only.insert(formats.begin(), formats.end());
  const pl::fs::path out_dir = output_dir;
  auto opt_path = [](const std::string& s) -> std::optional<pl::fs::path> {
    if (s.empty()) return std::nullopt;
    return pl::fs::path(s);
  };

  try {
    if (*parse) return pl::cmd_parse({corpus, opt_path(coverage)}, std::cout);
    if (*graph) return pl::cmd_graph({{corpus, opt_path(coverage)}, out_dir, fmt}, std::cout);
    if (*select) {
      sel.ensemble_csv = ensemble;
      sel.output_dir = out_dir;
      return pl::cmd_select(sel, std::cout);
    }
    if (*slice) {
      sl.graph = graph_path;
      sl.selection_csv = opt_path(selection_csv);
      sl.name_map = opt_path(name_map);
      sl.output_dir = out_dir;
      sl.formats = fmt;
      if (sl.targets.empty() && !sl.selection_csv) throw dgtrace::InputError("give --target or --selection");
      return pl::cmd_slice(sl, std::cout);
    }
    if (*communities) {
      co.graph = graph_path;
      co.output_dir = out_dir;
      co.formats = fmt;
      return pl::cmd_communities(co, std::cout);
    }
    if (*centrality) {
      ce.graph = graph_path;
      ce.output_dir = out_dir;
      return pl::cmd_centrality(ce, std::cout);
    }
    if (*refine) {
      re.slice = slice_path;
      re.graph = graph_path;
      re.bugs = bugs;
      re.export_dot = !no_dot && fmt.wants("dot");
      re.output_dir = out_dir;
      return pl::cmd_refine(re, std::cout);
    }
    if (*quotient) {
      qu.graph = graph_path;
      qu.output_dir = out_dir;
      qu.formats = fmt;
      return pl::cmd_quotient(qu, std::cout);
    }
    if (*degree) return pl::cmd_degree_dist({graph_path, out_dir}, std::cout);
    if (*synth) return pl::cmd_synth({seed, synth_target, out_dir}, std::cout);
  } catch (const dgtrace::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pl::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pl::input_error;
  }
  return pl::input_error;
}
