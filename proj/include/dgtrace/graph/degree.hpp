#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "dgtrace/graph/digraph.hpp"

namespace dgtrace::graph {

struct DegreeHistogram {
  std::map<std::size_t, std::size_t> counts;  // total degree -> node count
  std::optional<double> fitted_exponent;     // empty when the fit is degenerate

  bool degenerate_fit() const { return !fitted_exponent; }
  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& [d, c] : counts) n += c;
    return n;
  }
};

// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// Power-law exponent alpha of p(k) ~ k^-alpha, estimated from the
// complementary cumulative distribution P(K >= k) ~ k^(1-alpha) over positive
// degrees. Empty when fewer than 3 distinct positive degrees exist.
inline std::optional<double> fit_power_law(const std::map<std::size_t, std::size_t>& counts) {
  std::vector<double> x, y;
  std::size_t total = 0;
  for (const auto& [d, c] : counts)
    if (d > 0) total += c;
  std::size_t tail = total;
  for (const auto& [d, c] : counts) {
    if (d == 0) continue;
    x.push_back(std::log(static_cast<double>(d)));
    y.push_back(std::log(static_cast<double>(tail) / static_cast<double>(total)));
    tail -= c;
  }
  if (x.size() < 3) return std::nullopt;
  return 1.0 - ls_slope(x, y);
}

inline DegreeHistogram degree_distribution(const Digraph& g) {
  DegreeHistogram h;
  for (NodeIndex v = 0; v < g.node_count(); ++v) ++h.counts[g.successors(v).size() + g.predecessors(v).size()];
  h.fitted_exponent = fit_power_law(h.counts);
  return h;
}

inline DegreeHistogram degree_distribution(const UndirectedGraph& g) {
  DegreeHistogram h;
  for (NodeIndex v = 0; v < g.node_count(); ++v) ++h.counts[g.neighbors(v).size()];
  h.fitted_exponent = fit_power_law(h.counts);
  return h;
}

}  // namespace dgtrace::graph
