#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dgtrace/diagnostics.hpp"
#include "dgtrace/error.hpp"
#include "dgtrace/graph/digraph.hpp"
#include "dgtrace/minifort/ast.hpp"
#include "dgtrace/minifort/symbols.hpp"

namespace dgtrace {

using graph::NodeIndex;

struct NodeMeta {
  std::string canonical_name;
  std::string module;
  std::optional<std::string> subprogram;
  std::set<int> lines;  // assignment sites
};

// Variable dependency graph: u -> v means the value of u influences v.
struct MetaGraph {
  graph::Digraph digraph;
  std::vector<NodeMeta> meta;  // indexed by NodeIndex
  minifort::SymbolTable symbols;
  std::map<std::string, std::set<std::string>> name_index;  // canonical -> node ids
  Diagnostics diagnostics;

  NodeIndex add_node(const std::string& id, NodeMeta m) {
    std::size_t before = digraph.node_count();
    NodeIndex v = digraph.add_node(id);
    if (digraph.node_count() > before) {
      name_index[m.canonical_name].insert(id);
      meta.push_back(std::move(m));
    }
    return v;
  }

  // Node `canonical__suffix`; the suffix is the subprogram, or the module for
  // module-level variables.
  NodeIndex add_variable(const std::string& canonical, const std::string& module,
                         const std::string& subprogram = "") {
    std::string suffix = symbols.scope_suffix(module, subprogram);
    NodeMeta m{canonical, module, subprogram.empty() ? std::nullopt : std::optional(subprogram), {}};
    return add_node(canonical + "__" + suffix, std::move(m));
  }

  bool add_edge(NodeIndex u, NodeIndex v) { return digraph.add_edge(u, v); }

  const NodeMeta& meta_of(NodeIndex v) const { return meta.at(v); }
  const std::string& id(NodeIndex v) const { return digraph.name(v); }
  std::optional<NodeIndex> find(std::string_view id) const { return digraph.find(id); }
  std::size_t node_count() const { return digraph.node_count(); }
  std::size_t edge_count() const { return digraph.edge_count(); }
};

inline std::string canonical_of(const minifort::VariableRef& ref) { return ref.canonical(); }

namespace detail {

using namespace minifort;

// Compiles statements into edges of a MetaGraph.
class EdgeCompiler {
 public:
  EdgeCompiler(MetaGraph& g, const SourceCorpus& corpus, const SymbolTable& table)
      : g_(g), corpus_(corpus), table_(table) {
    for (const auto& u : corpus.units) {
      auto& names = module_vars_[u.module_name];
      names = u.declared;
      for (const auto& st : u.statements)
        if (st.kind == StatementKind::assignment) names.insert(st.lhs.base_name);
    }
  }

  void compile_corpus() {
    for (const auto& unit : corpus_.units) {
      Context ctx{&unit, nullptr};
      for (const auto& st : unit.statements) compile(st, ctx);
      for (const auto& sub : unit.subprograms) {
        Context sctx{&unit, &sub};
        for (const auto& st : sub.statements) compile(st, sctx);
      }
    }
  }

  struct Context {
    const SourceUnit* unit;
    const SubprogramDef* sub;
    Scope scope() const { return {unit->module_name, sub ? sub->name : std::string()}; }
  };

  void compile(const Statement& st, const Context& ctx) {
    line_ = st.line;
    intrinsic_uses_.clear();
    if (st.kind == StatementKind::assignment) {
      NodeIndex lhs = variable(st.lhs, ctx);
      g_.meta[lhs].lines.insert(st.line);
      for (NodeIndex s : sources(st.rhs, ctx)) g_.add_edge(s, lhs);
    } else if (st.kind == StatementKind::call) {
      call_statement(st.call, ctx);
    }
  }

  void call_statement(const CallNode& call, const Context& ctx) {
    Scope scope = ctx.scope();
    const Signature* sig = resolve_subprogram(call.name, scope, table_);
    if (!sig) sig = resolve_subprogram_global(call.name, table_);
    if (!sig) {
      diag(Severity::warning, ctx, "call to unknown subroutine '" + call.name + "'; no edges injected");
      return;
    }
    map_arguments(call, *sig, ctx);
  }

  // Maps actual arguments onto the callee's formals, depth first. Returns
  // false (and emits a diagnostic) on arity mismatch.
  bool map_arguments(const CallNode& call, const Signature& sig, const Context& ctx) {
    if (call.args.size() > sig.formals.size()) {
      diag(Severity::warning, ctx,
           "arity mismatch calling '" + sig.id.name + "': " + std::to_string(call.args.size()) +
               " actuals for " + std::to_string(sig.formals.size()) + " formals; call skipped");
      return false;
    }
    for (std::size_t i = 0; i < call.args.size(); ++i) {
      std::size_t slot = i;
      if (!call.keywords[i].empty()) {
        auto it = std::find(sig.formals.begin(), sig.formals.end(), call.keywords[i]);
        if (it == sig.formals.end()) {
          diag(Severity::warning, ctx,
               "no formal '" + call.keywords[i] + "' in '" + sig.id.name + "'; argument ignored");
          continue;
        }
        slot = static_cast<std::size_t>(it - sig.formals.begin());
      }
      NodeIndex formal = g_.add_variable(sig.formals[slot], sig.id.module, sig.id.name);
      Intent intent = sig.intents[slot];
      const Expr& actual = call.args[i];
      if (intent != Intent::out)
        for (NodeIndex s : sources(actual, ctx)) g_.add_edge(s, formal);
      if (intent != Intent::in) {
        if (auto target = assignable(actual, ctx)) {
          g_.add_edge(formal, *target);
          g_.meta[*target].lines.insert(line_);
        }
      }
    }
    return true;
  }

  // Nodes feeding the consumer of `e`: variables and call outputs at this
  // level. Nested calls get their argument edges as a side effect.
  std::vector<NodeIndex> sources(const Expr& e, const Context& ctx) {
    std::vector<NodeIndex> out;
    collect(e, ctx, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  NodeIndex variable(const VariableRef& ref, const Context& ctx) {
    const std::string& base = ref.base_name;
    std::string canonical = ref.canonical();
    const std::string& module = ctx.unit->module_name;
    if (ctx.sub) {
      const SubprogramDef& s = *ctx.sub;
      if (s.kind == SubprogramKind::function && base == s.result_name) {
        if (ref.derived_path.empty()) canonical = s.name + "_result";
        return g_.add_variable(canonical, module, s.name);
      }
      if (s.is_formal(base) || s.declared.count(base)) return g_.add_variable(canonical, module, s.name);
    }
    if (module_vars_[module].count(base)) return g_.add_variable(canonical, module);
    if (const QualifiedName* a = table_.alias(module, base)) {
      if (ref.derived_path.empty()) canonical = a->name;
      return g_.add_variable(canonical, a->module);
    }
    return g_.add_variable(canonical, module, ctx.sub ? ctx.sub->name : std::string());
  }

 private:
  void collect(const Expr& e, const Context& ctx, std::vector<NodeIndex>& out) {
    if (auto* v = e.as<VariableRef>()) {
      out.push_back(variable(*v, ctx));
    } else if (auto* op = e.as<Operation>()) {
      for (const auto& x : op->operands) collect(x, ctx, out);
    } else if (auto* c = e.as<CallNode>()) {
      collect_call(*c, ctx, out);
    }
  }

  void collect_call(const CallNode& c, const Context& ctx, std::vector<NodeIndex>& out) {
    Scope scope = ctx.scope();
    CallableKind kind = classify_callable(c.name, scope, table_);
    switch (kind) {
      case CallableKind::function: {
        const Signature* sig = resolve_subprogram(c.name, scope, table_);
        if (!sig) sig = resolve_subprogram_global(c.name, table_);
        map_arguments(c, *sig, ctx);
        out.push_back(g_.add_variable(sig->id.name + "_result", sig->id.module, sig->id.name));
        return;
      }
      case CallableKind::subroutine:
        diag(Severity::warning, ctx, "subroutine '" + c.name + "' used as a function; ignored");
        return;
      case CallableKind::intrinsic: {
        std::string canonical = c.name + "_" + std::to_string(line_);
        const std::string& module = ctx.unit->module_name;
        NodeIndex node = g_.add_node(canonical + "__" + module, NodeMeta{canonical, module, std::nullopt, {}});
        if (!intrinsic_uses_.insert(node).second)
          diag(Severity::note, ctx, "two '" + c.name + "' calls on one line share node " + g_.id(node));
        for (const auto& a : c.args)
          for (NodeIndex s : sources(a, ctx)) g_.add_edge(s, node);
        out.push_back(node);
        return;
      }
      case CallableKind::unknown:
        diag(Severity::note, ctx, "'" + c.name + "' is neither declared nor a known function; treated as array");
        [[fallthrough]];
      case CallableKind::array:
        out.push_back(variable(VariableRef{c.name, {}, true}, ctx));
        return;
    }
  }

  // Variable an output argument writes back to, if the actual is a designator.
  std::optional<NodeIndex> assignable(const Expr& actual, const Context& ctx) {
    if (auto* v = actual.as<VariableRef>()) return variable(*v, ctx);
    if (auto* c = actual.as<CallNode>()) {
      CallableKind k = classify_callable(c->name, ctx.scope(), table_);
      if (k == CallableKind::array || k == CallableKind::unknown)
        return variable(VariableRef{c->name, {}, true}, ctx);
    }
    return std::nullopt;
  }

  void diag(Severity s, const Context& ctx, std::string msg) {
    g_.diagnostics.push_back({s, ctx.unit->module_name, line_, std::move(msg)});
  }

  MetaGraph& g_;
  const SourceCorpus& corpus_;
  const SymbolTable& table_;
  std::map<std::string, std::set<std::string>> module_vars_;
  std::set<NodeIndex> intrinsic_uses_;
  int line_ = 0;
};

}  // namespace detail

// Compiles a coverage-filtered, resolved corpus into its variable digraph.
// Statements that cannot be compiled are skipped with a diagnostic.
inline MetaGraph build_metagraph(const minifort::SourceCorpus& corpus, const minifort::SymbolTable& table) {
  MetaGraph g;
  g.symbols = table;
  g.diagnostics = table.diagnostics;
  detail::EdgeCompiler c(g, corpus, table);
  c.compile_corpus();
  return g;
}

// Edges injected by one call, as (from, to) node ids, with the call placed in
// `caller` scope of `corpus`.
inline std::vector<std::pair<std::string, std::string>> map_call(const minifort::CallNode& call,
                                                                 const minifort::Signature& callee,
                                                                 const minifort::Scope& caller,
                                                                 const minifort::SourceCorpus& corpus,
                                                                 const minifort::SymbolTable& table) {
  MetaGraph g;
  g.symbols = table;
  detail::EdgeCompiler c(g, corpus, table);
  const minifort::SourceUnit* unit = corpus.find(caller.module);
  if (!unit) throw InputError("map_call: unknown module '" + caller.module + "'");
  const minifort::SubprogramDef* sub = caller.subprogram.empty() ? nullptr : unit->find_subprogram(caller.subprogram);
  if (!c.map_arguments(call, callee, {unit, sub}))
    return {};
  return g.digraph.named_edges();
}

}  // namespace dgtrace
