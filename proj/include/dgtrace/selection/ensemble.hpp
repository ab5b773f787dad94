#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dgtrace/error.hpp"

namespace dgtrace::selection {

enum class Role { ensemble, experiment };

// Per-variable samples from accepted ensemble members and experimental runs.
struct EnsembleTable {
  std::vector<std::string> variables;  // first-appearance order
  std::map<std::string, std::vector<double>> ensemble;
  std::map<std::string, std::vector<double>> experiment;

  void add(const std::string& variable, Role role, double value) { add(variable, role, std::vector<double>{value}); }

  void add(const std::string& variable, Role role, const std::vector<double>& values) {
    if (!ensemble.count(variable) && !experiment.count(variable)) variables.push_back(variable);
    auto& dst = role == Role::ensemble ? ensemble[variable] : experiment[variable];
    dst.insert(dst.end(), values.begin(), values.end());
  }

  std::size_t ensemble_size() const { return ensemble.empty() ? 0 : ensemble.begin()->second.size(); }
  std::size_t experiment_size() const { return experiment.empty() ? 0 : experiment.begin()->second.size(); }

  // Throws InputError unless every variable has E >= 3 ensemble values and
  // X >= 1 experiment values, with E and X uniform across variables.
  void validate() const {
    if (variables.empty()) throw InputError("ensemble table has no variables");
    const std::size_t e = ensemble_size(), x = experiment_size();
    for (const auto& v : variables) {
      auto ie = ensemble.find(v);
      auto ix = experiment.find(v);
      if (ie == ensemble.end() || ix == experiment.end())
        throw InputError("variable '" + v + "' lacks ensemble or experiment values");
      if (ie->second.size() != e || ix->second.size() != x)
        throw InputError("variable '" + v + "' has a different sample count");
    }
    if (e < 3) throw InputError("ensemble needs at least 3 members");
    if (x < 1) throw InputError("experiment needs at least 1 run");
  }
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

// CSV with header "variable,role,values..."; each row holds one or more
// values of one variable for one role. Rows for the same (variable, role)
// append.
inline EnsembleTable parse_ensemble_csv(const std::string& text) {
  EnsembleTable t;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool header = true;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = detail::split_csv(line);
    if (header) {
      header = false;
      if (cells.size() < 2 || cells[0] != "variable" || cells[1] != "role")
        throw InputError("ensemble CSV: header must start with 'variable,role'");
      continue;
    }
    if (cells.size() < 3) throw InputError("ensemble CSV line " + std::to_string(lineno) + ": no values");
    Role role;
    if (cells[1] == "ensemble")
      role = Role::ensemble;
    else if (cells[1] == "experiment")
      role = Role::experiment;
    else
      throw InputError("ensemble CSV line " + std::to_string(lineno) + ": unknown role '" + cells[1] + "'");
    std::vector<double> values;
    for (std::size_t i = 2; i < cells.size(); ++i) {
      if (cells[i].empty()) continue;
      char* end = nullptr;
      double v = std::strtod(cells[i].c_str(), &end);
      if (end != cells[i].c_str() + cells[i].size())
        throw InputError("ensemble CSV line " + std::to_string(lineno) + ": bad number '" + cells[i] + "'");
      values.push_back(v);
    }
    t.add(cells[0], role, values);
  }
  if (header) throw InputError("ensemble CSV is empty");
  t.validate();
  return t;
}

inline EnsembleTable read_ensemble_csv(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ensemble_csv(ss.str());
}

inline std::string to_csv(const EnsembleTable& t) {
  std::ostringstream os;
  os.precision(17);
  os << "variable,role,values\n";
  for (const auto& v : t.variables) {
    for (auto [role, m] : {std::pair{"ensemble", &t.ensemble}, std::pair{"experiment", &t.experiment}}) {
      auto it = m->find(v);
      if (it == m->end()) continue;
      os << v << ',' << role;
      for (double x : it->second) os << ',' << x;
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace dgtrace::selection
