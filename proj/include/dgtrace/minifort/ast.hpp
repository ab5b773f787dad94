#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dgtrace/diagnostics.hpp"

namespace dgtrace::minifort {

struct Expr;

struct Literal {
  std::string text;
};

// A reference to data. Subscripts are not kept: arrays are atomic.
struct VariableRef {
  std::string base_name;
  std::vector<std::string> derived_path;  // components after the first `%`
  bool is_indexed = false;

  // Last derived-type component if any, else the base name.
  const std::string& canonical() const {
    return derived_path.empty() ? base_name : derived_path.back();
  }
};

// `name(args)`: a function call, an intrinsic or an indexed array. The parser
// cannot tell which; the symbol table decides.
struct CallNode {
  std::string name;
  std::vector<Expr> args;
  std::vector<std::string> keywords;  // parallel to args, "" when positional
};

// Operator application; `op` is the operator spelling (e.g. "+", ".and.", ":").
struct Operation {
  std::string op;
  std::vector<Expr> operands;
};

struct Expr {
  std::variant<Literal, VariableRef, CallNode, Operation> node;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

enum class Intent { unspecified, in, out, inout };

struct DeclaredEntity {
  std::string name;
  bool dimensioned = false;
};

struct Declaration {
  std::string type_spec;
  Intent intent = Intent::unspecified;
  bool dimensioned = false;  // `dimension(...)` attribute
  std::optional<bool> visibility_public;
  std::vector<DeclaredEntity> entities;
};

struct UseStatement {
  std::string source_module;
  bool has_only = false;
  std::vector<std::pair<std::string, std::string>> only_list;  // (remote, local)
  std::map<std::string, std::string> renames;                  // remote -> local
};

enum class StatementKind { assignment, call, declaration, other };

struct Statement {
  StatementKind kind = StatementKind::other;
  int line = 0;
  std::string text;

  // assignment
  VariableRef lhs;
  Expr rhs;
  bool pointer_assignment = false;

  // call
  CallNode call;

  // declaration (type declarations and use statements)
  std::optional<Declaration> declaration;
  std::optional<UseStatement> use;

  // set when the statement could not be parsed
  std::optional<std::string> diagnostic;
};

enum class SubprogramKind { subroutine, function };

struct SubprogramDef {
  std::string name;
  SubprogramKind kind = SubprogramKind::subroutine;
  std::vector<std::string> formals;
  std::string result_name;  // functions only: `result(r)` or the function name
  std::map<std::string, Intent> intents;
  std::set<std::string> declared;
  std::set<std::string> arrays;
  std::vector<UseStatement> uses;
  std::vector<Statement> statements;
  int line_begin = 0;
  int line_end = 0;

  Intent intent_of(const std::string& formal) const {
    auto it = intents.find(formal);
    return it == intents.end() ? Intent::unspecified : it->second;
  }
  bool is_formal(const std::string& n) const {
    return std::find(formals.begin(), formals.end(), n) != formals.end();
  }
};

struct SourceUnit {
  std::string module_name;
  std::string path;
  std::vector<Statement> statements;  // module-level statements
  std::vector<SubprogramDef> subprograms;
  std::vector<UseStatement> uses;     // module-level use statements
  std::set<std::string> public_symbols;
  std::set<std::string> declared;     // module-level variables
  std::set<std::string> arrays;
  Diagnostics diagnostics;

  const SubprogramDef* find_subprogram(const std::string& n) const {
    for (const auto& s : subprograms)
      if (s.name == n) return &s;
    return nullptr;
  }
  std::size_t statement_count() const {
    std::size_t n = statements.size();
    for (const auto& s : subprograms) n += s.statements.size();
    return n;
  }
};

struct SourceCorpus {
  std::vector<SourceUnit> units;
  Diagnostics diagnostics;

  const SourceUnit* find(const std::string& module) const {
    for (const auto& u : units)
      if (u.module_name == module) return &u;
    return nullptr;
  }
  std::size_t subprogram_count() const {
    std::size_t n = 0;
    for (const auto& u : units) n += u.subprograms.size();
    return n;
  }
  std::size_t statement_count() const {
    std::size_t n = 0;
    for (const auto& u : units) n += u.statement_count();
    return n;
  }
};

}  // namespace dgtrace::minifort
