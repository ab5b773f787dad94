#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dgtrace/diagnostics.hpp"
#include "dgtrace/minifort/ast.hpp"

namespace dgtrace::minifort {

struct QualifiedName {
  std::string module;
  std::string name;

  auto operator<=>(const QualifiedName&) const = default;
  bool operator==(const QualifiedName&) const = default;
};

// Call interface of a subprogram, detached from its body.
struct Signature {
  QualifiedName id;
  SubprogramKind kind = SubprogramKind::subroutine;
  std::vector<std::string> formals;
  std::vector<Intent> intents;  // parallel to formals
  std::string result_name;      // functions only
};

enum class CallableKind { function, subroutine, intrinsic, array, unknown };

inline const char* to_string(CallableKind k) {
  switch (k) {
    case CallableKind::function:
      return "function";
    case CallableKind::subroutine:
      return "subroutine";
    case CallableKind::intrinsic:
      return "intrinsic";
    case CallableKind::array:
      return "array";
    case CallableKind::unknown:
      return "unknown";
  }
  return "?";
}

inline const std::set<std::string>& default_intrinsics() {
  static const std::set<std::string> names = {"min", "max", "abs", "sqrt", "exp", "log", "sum"};
  return names;
}

struct SymbolTable {
  std::map<QualifiedName, Signature> functions;
  std::map<QualifiedName, Signature> subroutines;
  std::set<std::string> intrinsics = default_intrinsics();
  // (module, local name) -> (defining module, remote name)
  std::map<QualifiedName, QualifiedName> local_alias;
  std::set<QualifiedName> unresolved;
  // dimensioned variables per scope; subprogram "" is module level
  std::map<QualifiedName, std::set<std::string>> arrays;
  // subprogram names that occur in more than one module or equal a module name
  std::set<std::string> ambiguous_subprograms;
  Diagnostics diagnostics;

  const QualifiedName* alias(const std::string& module, const std::string& local) const {
    auto it = local_alias.find({module, local});
    return it == local_alias.end() ? nullptr : &it->second;
  }

  const Signature* subprogram(const QualifiedName& q) const {
    if (auto it = functions.find(q); it != functions.end()) return &it->second;
    if (auto it = subroutines.find(q); it != subroutines.end()) return &it->second;
    return nullptr;
  }

  // Suffix of node ids for variables in `sub` of `module` (module level when
  // `sub` is empty).
  std::string scope_suffix(const std::string& module, const std::string& sub) const {
    if (sub.empty()) return module;
    if (ambiguous_subprograms.count(sub)) return sub + "__" + module;
    return sub;
  }
};

struct Scope {
  std::string module;
  std::string subprogram;  // empty at module level
};

namespace detail {

inline Signature signature_of(const std::string& module, const SubprogramDef& s) {
  Signature sig;
  sig.id = {module, s.name};
  sig.kind = s.kind;
  sig.formals = s.formals;
  for (const auto& f : s.formals) sig.intents.push_back(s.intent_of(f));
  sig.result_name = s.result_name;
  return sig;
}

inline void import_use(SymbolTable& t, const SourceCorpus& corpus, const std::string& module,
                       const UseStatement& u, int line) {
  const SourceUnit* src = corpus.find(u.source_module);
  auto add = [&](const std::string& remote, const std::string& local) {
    QualifiedName key{module, local}, target{u.source_module, remote};
    auto [it, inserted] = t.local_alias.emplace(key, target);
    if (!inserted && it->second != target)
      t.diagnostics.push_back({Severity::warning, module, line,
                               "'" + local + "' imported from both " + it->second.module + " and " +
                                   u.source_module + "; keeping " + it->second.module});
  };
  if (!src) {
    t.diagnostics.push_back(
        {Severity::warning, module, line, "use of unknown module '" + u.source_module + "'"});
    for (const auto& [remote, local] : u.only_list) {
      add(remote, local);
      t.unresolved.insert({u.source_module, remote});
    }
    return;
  }
  if (u.has_only) {
    for (const auto& [remote, local] : u.only_list) {
      add(remote, local);
      if (!src->public_symbols.count(remote)) {
        // possibly re-exported from a third module; chains are not followed
        t.unresolved.insert({u.source_module, remote});
        t.diagnostics.push_back({Severity::note, module, line,
                                 "'" + remote + "' is not a public entity of " + u.source_module});
      }
    }
    return;
  }
  for (const auto& p : src->public_symbols) {
    auto r = u.renames.find(p);
    add(p, r == u.renames.end() ? p : r->second);
  }
  for (const auto& [remote, local] : u.renames)
    if (!src->public_symbols.count(remote)) {
      add(remote, local);
      t.unresolved.insert({u.source_module, remote});
    }
}

}  // namespace detail

// Builds the symbol table: callable registries, rename-aware use aliases, and
// per-scope array declarations. Units are visited in module-name order, so
// the result does not depend on corpus order.
inline SymbolTable resolve_uses(const SourceCorpus& corpus) {
  SymbolTable t;
  std::vector<const SourceUnit*> units;
  for (const auto& u : corpus.units) units.push_back(&u);
  std::sort(units.begin(), units.end(),
            [](const SourceUnit* a, const SourceUnit* b) { return a->module_name < b->module_name; });

  std::map<std::string, int> sub_count;
  std::set<std::string> module_names;
  for (const auto* u : units) {
    module_names.insert(u->module_name);
    t.arrays[{u->module_name, ""}] = u->arrays;
    for (const auto& s : u->subprograms) {
      ++sub_count[s.name];
      auto sig = detail::signature_of(u->module_name, s);
      (s.kind == SubprogramKind::function ? t.functions : t.subroutines)[sig.id] = sig;
      t.arrays[{u->module_name, s.name}] = s.arrays;
    }
  }
  for (const auto& [name, n] : sub_count)
    if (n > 1 || module_names.count(name)) t.ambiguous_subprograms.insert(name);

  for (const auto* u : units) {
    for (const auto& use : u->uses) {
      int line = 0;
      for (const auto& st : u->statements)
        if (st.use && st.use->source_module == use.source_module) line = st.line;
      detail::import_use(t, corpus, u->module_name, use, line);
    }
    for (const auto& s : u->subprograms)
      for (const auto& use : s.uses) detail::import_use(t, corpus, u->module_name, use, s.line_begin);
  }
  return t;
}

// Resolves `name` as seen from `scope` to the subprogram it denotes, if any:
// same-module subprogram, then use alias, then a globally unique name.
inline const Signature* resolve_subprogram(const std::string& name, const Scope& scope,
                                           const SymbolTable& t) {
  if (auto* s = t.subprogram({scope.module, name})) return s;
  if (auto* a = t.alias(scope.module, name)) return t.subprogram(*a);
  return nullptr;
}

inline const Signature* resolve_subprogram_global(const std::string& name, const SymbolTable& t) {
  const Signature* found = nullptr;
  for (const auto* reg : {&t.functions, &t.subroutines})
    for (const auto& [q, sig] : *reg)
      if (q.name == name) {
        if (found) return nullptr;
        found = &sig;
      }
  return found;
}

inline bool is_declared_array(const std::string& name, const Scope& scope, const SymbolTable& t) {
  auto has = [&](const QualifiedName& q, const std::string& n) {
    auto it = t.arrays.find(q);
    return it != t.arrays.end() && it->second.count(n) > 0;
  };
  if (!scope.subprogram.empty() && has({scope.module, scope.subprogram}, name)) return true;
  if (has({scope.module, ""}, name)) return true;
  if (auto* a = t.alias(scope.module, name)) return has({a->module, ""}, a->name);
  return false;
}

// Decides what `name(...)` denotes in `scope`. Undeclared names that are not
// callables come back `unknown`; callers treat those as arrays.
inline CallableKind classify_callable(const std::string& name, const Scope& scope,
                                      const SymbolTable& t) {
  auto kind_of = [](const Signature& s) {
    return s.kind == SubprogramKind::function ? CallableKind::function : CallableKind::subroutine;
  };
  if (auto* s = resolve_subprogram(name, scope, t)) return kind_of(*s);
  if (t.intrinsics.count(name)) return CallableKind::intrinsic;
  if (is_declared_array(name, scope, t)) return CallableKind::array;
  if (auto* s = resolve_subprogram_global(name, t)) return kind_of(*s);
  return CallableKind::unknown;
}

inline CallableKind classify_callable(const std::string& name, const std::string& module,
                                      const SymbolTable& t) {
  return classify_callable(name, Scope{module, ""}, t);
}

}  // namespace dgtrace::minifort
