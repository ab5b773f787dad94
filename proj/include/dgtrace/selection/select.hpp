#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dgtrace/diagnostics.hpp"
#include "dgtrace/error.hpp"
#include "dgtrace/selection/ensemble.hpp"
#include "dgtrace/selection/stats.hpp"

namespace dgtrace::selection {

enum class SelectionMethod { raw_diff, median_distance, lasso };

inline std::string to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::raw_diff: return "raw_diff";
    case SelectionMethod::median_distance: return "median_distance";
    case SelectionMethod::lasso: return "lasso";
  }
  return "?";
}

struct SelectionResult {
  std::vector<std::pair<std::string, double>> ranked;  // descending score
  SelectionMethod method = SelectionMethod::raw_diff;
  std::optional<double> lambda;
  bool tuning_failed = false;
  Diagnostics warnings;

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [n, s] : ranked) out.push_back(n);
    return out;
  }
};

inline void sort_ranked(std::vector<std::pair<std::string, double>>& r) {
  std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
}

// Normalized difference between one ensemble member and one experimental run:
// |e - x| / max(|e|, floor), keeping variables above rel_tol.
inline SelectionResult raw_diff(const EnsembleTable& t, std::size_t member_index, std::size_t run_index,
                                double rel_tol, double floor = 1e-12) {
  if (member_index >= t.ensemble_size() || run_index >= t.experiment_size())
    throw InputError("raw_diff: member or run index out of range");
  SelectionResult r;
  r.method = SelectionMethod::raw_diff;
  for (const auto& v : t.variables) {
    double e = t.ensemble.at(v).at(member_index);
    double x = t.experiment.at(v).at(run_index);
    double d = std::abs(e - x) / std::max(std::abs(e), floor);
    if (d > rel_tol) r.ranked.emplace_back(v, d);
  }
  sort_ranked(r.ranked);
  return r;
}

// Standardizes both samples by the ensemble mean and standard deviation,
// keeps variables whose interquartile ranges are disjoint, and scores them by
// the distance between medians.
inline SelectionResult median_distance(const EnsembleTable& t) {
  t.validate();
  SelectionResult r;
  r.method = SelectionMethod::median_distance;
  for (const auto& v : t.variables) {
    const auto& ens = t.ensemble.at(v);
    const auto& exp = t.experiment.at(v);
    double mu = stats::mean(ens), sd = stats::sample_std(ens);
    if (!(sd > 0)) {
      r.warnings.push_back({Severity::warning, "", 0, "variable '" + v + "' has zero ensemble variance; excluded"});
      continue;
    }
    auto z = [&](const std::vector<double>& x) {
      std::vector<double> out;
      out.reserve(x.size());
      for (double a : x) out.push_back((a - mu) / sd);
      return out;
    };
    auto ze = z(ens), zx = z(exp);
    double e1 = stats::quantile(ze, 0.25), e3 = stats::quantile(ze, 0.75);
    double x1 = stats::quantile(zx, 0.25), x3 = stats::quantile(zx, 0.75);
    if (x3 < e1 || x1 > e3) r.ranked.emplace_back(v, std::abs(stats::median(zx) - stats::median(ze)));
  }
  sort_ranked(r.ranked);
  return r;
}

// CSV "rank,variable,score" with 1-based ranks.
inline std::string to_csv(const SelectionResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "rank,variable,score\n";
  for (std::size_t i = 0; i < r.ranked.size(); ++i)
    os << i + 1 << ',' << r.ranked[i].first << ',' << r.ranked[i].second << '\n';
  return os.str();
}

}  // namespace dgtrace::selection
