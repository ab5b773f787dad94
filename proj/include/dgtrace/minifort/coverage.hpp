#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "dgtrace/error.hpp"
#include "dgtrace/minifort/ast.hpp"
#include "dgtrace/minifort/parser.hpp"

namespace dgtrace::minifort {

// Module + subprogram granularity coverage. Line-level coverage is not used.
struct CoverageReport {
  std::set<std::string> executed_modules;
  std::map<std::string, std::set<std::string>> executed_subprograms;
};

// Schema: {"modules": [{"name": str, "subprograms": [str, ...]}, ...]}
inline CoverageReport parse_coverage_json(const std::string& text) {
  CoverageReport r;
  try {
    auto j = nlohmann::json::parse(text);
    for (const auto& m : j.at("modules")) {
      std::string name = detail::lower_copy(m.at("name").get<std::string>());
      r.executed_modules.insert(name);
      auto& subs = r.executed_subprograms[name];
      if (m.contains("subprograms"))
        for (const auto& s : m.at("subprograms")) subs.insert(detail::lower_copy(s.get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("coverage JSON: ") + e.what());
  }
  return r;
}

inline CoverageReport read_coverage(const std::filesystem::path& p) {
  return parse_coverage_json(read_text_file(p));
}

namespace detail {
inline void add_once(Diagnostics& diags, Diagnostic d) {
  if (std::find(diags.begin(), diags.end(), d) == diags.end()) diags.push_back(std::move(d));
}
}  // namespace detail

// Drops unexecuted modules and, inside executed ones, unexecuted subprograms.
// Module-level statements are kept unchanged. Unknown names only warn.
inline SourceCorpus apply_coverage(const SourceCorpus& corpus, const CoverageReport& report) {
  SourceCorpus out;
  out.diagnostics = corpus.diagnostics;
  for (const auto& name : report.executed_modules)
    if (!corpus.find(name))
      detail::add_once(out.diagnostics, {Severity::warning, name, 0, "coverage names unknown module"});

  for (const auto& unit : corpus.units) {
    if (!report.executed_modules.count(unit.module_name)) continue;
    SourceUnit kept = unit;
    kept.subprograms.clear();
    auto it = report.executed_subprograms.find(unit.module_name);
    const std::set<std::string> none;
    const auto& executed = it == report.executed_subprograms.end() ? none : it->second;
    for (const auto& s : unit.subprograms)
      if (executed.count(s.name)) kept.subprograms.push_back(s);
    for (const auto& s : executed)
      if (!unit.find_subprogram(s))
        detail::add_once(out.diagnostics,
            {Severity::warning, unit.module_name, 0, "coverage names unknown subprogram '" + s + "'"});
    out.units.push_back(std::move(kept));
  }
  return out;
}

}  // namespace dgtrace::minifort
