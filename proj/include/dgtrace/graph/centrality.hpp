#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "dgtrace/error.hpp"
#include "dgtrace/graph/digraph.hpp"

namespace dgtrace::graph {

enum class CentralityMethod { eigen_in, eigen_out, nonbacktracking_in, nonbacktracking_out };

inline std::string to_string(CentralityMethod m) {
  switch (m) {
    case CentralityMethod::eigen_in: return "eigen_in";
    case CentralityMethod::eigen_out: return "eigen_out";
    case CentralityMethod::nonbacktracking_in: return "nonbacktracking_in";
    case CentralityMethod::nonbacktracking_out: return "nonbacktracking_out";
  }
  return "?";
}

struct PowerIterationOptions {
  double tol = 1e-10;
  int max_iter = 1000;
};

struct CentralityRanking {
  std::map<std::string, double> scores;
  std::vector<std::string> ordering;  // descending score, ties by name
  CentralityMethod method = CentralityMethod::eigen_in;
  bool converged = false;
  int iterations = 0;

  double score(const std::string& node) const { return scores.at(node); }
  std::size_t rank_of(const std::string& node) const {
    return static_cast<std::size_t>(std::find(ordering.begin(), ordering.end(), node) - ordering.begin());
  }
  std::vector<std::string> top(std::size_t m) const {
    return {ordering.begin(), ordering.begin() + static_cast<std::ptrdiff_t>(std::min(m, ordering.size()))};
  }
};

// Score rounded to about 12 significant digits, as an order-preserving key.
inline std::pair<int, long long> score_key(double s) {
  if (!(s > 0)) return {std::numeric_limits<int>::min(), 0};
  int e;
  double mant = std::frexp(s, &e);
  long long q = std::llround(mant * 0x1.0p40);
  if (q == (1LL << 40)) {
    q >>= 1;
    ++e;
  }
  return {e, q};
}

// Orders names by descending score. Scores equal to about 12 significant
// digits tie and fall back to name order.
inline std::vector<std::string> rank_by_score(const std::map<std::string, double>& scores) {
  std::vector<std::pair<std::pair<int, long long>, std::string>> keyed;
  keyed.reserve(scores.size());
  for (const auto& [name, s] : scores) keyed.emplace_back(score_key(s), name);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> out;
  out.reserve(keyed.size());
  for (auto& [k, n] : keyed) out.push_back(std::move(n));
  return out;
}

namespace detail {

inline double normalize2(std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  s = std::sqrt(s);
  if (s > 0)
    for (double& v : x) v /= s;
  return s;
}

// Power iteration of (I + M) where `apply` computes y = M x. Starts from the
// uniform vector; stops when successive unit vectors differ by < tol in the
// max norm.
template <typename Apply>
std::vector<double> shifted_power_iteration(std::size_t n, Apply apply, const PowerIterationOptions& opt,
                                            bool& converged, int& iterations) {
  std::vector<double> x(n, 1.0), y(n);
  normalize2(x);
  converged = false;
  iterations = 0;
  for (int it = 1; it <= opt.max_iter; ++it) {
    std::fill(y.begin(), y.end(), 0.0);
    apply(x, y);
    for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
    normalize2(y);
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(y[i] - x[i]));
    x.swap(y);
    iterations = it;
    if (delta < opt.tol) {
      converged = true;
      break;
    }
  }
  return x;
}

inline CentralityRanking make_ranking(const Digraph& g, const std::vector<double>& x, CentralityMethod m,
                                      bool converged, int iterations) {
  CentralityRanking r;
  r.method = m;
  r.converged = converged;
  r.iterations = iterations;
  for (NodeIndex v = 0; v < g.node_count(); ++v) r.scores[g.name(v)] = std::max(0.0, x[v]);
  r.ordering = rank_by_score(r.scores);
  return r;
}

}  // namespace detail

// Eigenvector in-centrality: leading eigenvector of A^T, so score flows along
// edges into sinks. Iterates x <- (I + A^T) x; the identity shift leaves the
// eigenvectors unchanged and keeps periodic and acyclic graphs from
// oscillating or collapsing to zero.
inline CentralityRanking eigen_in_centrality(const Digraph& g, const PowerIterationOptions& opt = {}) {
  if (g.node_count() == 0) throw EmptyGraph("centrality of an empty graph");
  const std::vector<Edge> edges = g.edges();
  bool converged;
  int iterations;
  auto x = detail::shifted_power_iteration(
      g.node_count(),
      [&](const std::vector<double>& in, std::vector<double>& out) {
        for (auto [u, v] : edges) out[v] += in[u];
      },
      opt, converged, iterations);
  return detail::make_ranking(g, x, CentralityMethod::eigen_in, converged, iterations);
}

inline CentralityRanking eigen_out_centrality(const Digraph& g, const PowerIterationOptions& opt = {}) {
  auto r = eigen_in_centrality(g.reversed(), opt);
  r.method = CentralityMethod::eigen_out;
  return r;
}

// Hashimoto non-backtracking centrality. B is indexed by directed edges with
// B[(u->v),(v->x)] = 1 for x != u. The node score is the sum of the leading
// eigenvector over the node's out-edges, normalised to unit 2-norm. The
// in-direction applies the same construction to the reversed graph. Throws
// ZeroSpectralRadius when B is nilpotent (its edge graph is acyclic).
inline CentralityRanking nonbacktracking_centrality(const Digraph& g, bool in_direction = true,
                                                    const PowerIterationOptions& opt = {}) {
  if (g.node_count() == 0) throw EmptyGraph("centrality of an empty graph");
  const Digraph h = in_direction ? g.reversed() : g;
  const std::vector<Edge> edges = h.edges();
  const std::size_t m = edges.size();
  if (m == 0) throw ZeroSpectralRadius("graph has no edges");

  std::vector<std::vector<std::size_t>> out_edges(h.node_count());
  for (std::size_t e = 0; e < m; ++e) out_edges[edges[e].first].push_back(e);
  // succ[e] = edges f continuing e without backtracking
  std::vector<std::vector<std::size_t>> succ(m);
  std::vector<std::size_t> indeg(m, 0);
  for (std::size_t e = 0; e < m; ++e) {
    auto [u, v] = edges[e];
    for (std::size_t f : out_edges[v])
      if (edges[f].second != u) {
        succ[e].push_back(f);
        ++indeg[f];
      }
  }
  {
    std::vector<std::size_t> deg = indeg, stack;
    for (std::size_t e = 0; e < m; ++e)
      if (deg[e] == 0) stack.push_back(e);
    std::size_t seen = 0;
    while (!stack.empty()) {
      std::size_t e = stack.back();
      stack.pop_back();
      ++seen;
      for (std::size_t f : succ[e])
        if (--deg[f] == 0) stack.push_back(f);
    }
    if (seen == m) throw ZeroSpectralRadius("non-backtracking matrix is nilpotent");
  }

  bool converged;
  int iterations;
  // Right eigenvector of B: (Bx)_e = sum over continuations f of x_f.
  auto x = detail::shifted_power_iteration(
      m,
      [&](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t e = 0; e < m; ++e)
          for (std::size_t f : succ[e]) out[e] += in[f];
      },
      opt, converged, iterations);

  std::vector<double> c(h.node_count(), 0.0);
  for (std::size_t e = 0; e < m; ++e) c[edges[e].first] += x[e];
  detail::normalize2(c);
  return detail::make_ranking(h, c,
                              in_direction ? CentralityMethod::nonbacktracking_in
                                           : CentralityMethod::nonbacktracking_out,
                              converged, iterations);
}

}  // namespace dgtrace::graph
