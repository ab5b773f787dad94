// Brute-force reference implementations used only by the tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "dgtrace/graph/digraph.hpp"

namespace oracle {

using dgtrace::graph::Digraph;
using dgtrace::graph::NodeIndex;
using dgtrace::graph::UndirectedGraph;

struct Rng {
  std::mt19937_64 e;
  explicit Rng(std::uint64_t s) : e(s) {}
  int below(int n) { return static_cast<int>(e() % static_cast<std::uint64_t>(n)); }
  double unit() { return static_cast<double>(e() >> 11) * 0x1.0p-53; }
  double normal() {
    double u = std::max(unit(), 1e-300), v = unit();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
  }
  bool chance(double p) { return unit() < p; }
};

inline std::string node_name(int i) { return "n" + std::to_string(i); }

inline Digraph random_digraph(Rng& rng, int n, double p, bool self_loops = false) {
  Digraph g;
  for (int i = 0; i < n; ++i) g.add_node(node_name(i));
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if ((u != v || self_loops) && rng.chance(p)) g.add_edge(u, v);
  return g;
}

// Undirected connected graph: random spanning tree plus extra edges.
inline UndirectedGraph random_connected(Rng& rng, int n, double extra) {
  UndirectedGraph g;
  for (int i = 0; i < n; ++i) g.add_node(node_name(i));
  for (int v = 1; v < n; ++v) g.add_edge(static_cast<NodeIndex>(rng.below(v)), static_cast<NodeIndex>(v));
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.chance(extra)) g.add_edge(u, v);
  return g;
}

// Hamiltonian cycle through a random node order plus random chords, as a
// symmetric digraph.
inline Digraph cycle_with_chords(Rng& rng, int n, int chords) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(rng.below(i + 1))]);
  Digraph g;
  for (int i = 0; i < n; ++i) g.add_node(node_name(i));
  auto both = [&](int a, int b) {
    g.add_edge(a, b);
    g.add_edge(b, a);
  };
  for (int i = 0; i < n; ++i) both(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>((i + 1) % n)]);
  for (int c = 0; c < chords;) {
    int a = rng.below(n), b = rng.below(n);
    if (a == b || g.has_edge(a, b)) continue;
    both(a, b);
    ++c;
  }
  return g;
}

// Every walk of exactly `len` steps from s to t, by exhaustive expansion.
inline void walks(const std::function<std::vector<NodeIndex>(NodeIndex)>& next, NodeIndex s, NodeIndex t, int len,
                  std::vector<NodeIndex>& cur, std::vector<std::vector<NodeIndex>>& out) {
  cur.push_back(s);
  if (len == 0) {
    if (s == t) out.push_back(cur);
  } else {
    for (NodeIndex w : next(s)) walks(next, w, t, len - 1, cur, out);
  }
  cur.pop_back();
}

// All shortest s-t paths: the walks of the smallest length that reaches t.
inline std::vector<std::vector<NodeIndex>> all_shortest_paths(
    const std::function<std::vector<NodeIndex>(NodeIndex)>& next, std::size_t n, NodeIndex s, NodeIndex t) {
  for (int len = 0; len < static_cast<int>(n); ++len) {
    std::vector<std::vector<NodeIndex>> out;
    std::vector<NodeIndex> cur;
    walks(next, s, t, len, cur, out);
    if (!out.empty()) return out;
  }
  return {};
}

// Nodes lying on some shortest path from any node to any terminal.
inline std::set<std::string> slice_nodes(const Digraph& g, const std::vector<NodeIndex>& terminals) {
  auto next = [&](NodeIndex v) {
    auto s = g.successors(v);
    return std::vector<NodeIndex>(s.begin(), s.end());
  };
  std::set<std::string> out;
  for (NodeIndex v = 0; v < g.node_count(); ++v)
    for (NodeIndex t : terminals)
      for (const auto& p : all_shortest_paths(next, g.node_count(), v, t))
        for (NodeIndex x : p) out.insert(g.name(x));
  return out;
}

// Edge betweenness by enumerating every unordered pair's shortest paths.
inline std::map<std::pair<NodeIndex, NodeIndex>, double> edge_betweenness(const UndirectedGraph& g) {
  std::map<std::pair<NodeIndex, NodeIndex>, double> eb;
  for (auto e : g.edges()) eb[e] = 0.0;
  auto next = [&](NodeIndex v) {
    auto s = g.neighbors(v);
    return std::vector<NodeIndex>(s.begin(), s.end());
  };
  for (NodeIndex s = 0; s < g.node_count(); ++s)
    for (NodeIndex t = s + 1; t < g.node_count(); ++t) {
      auto paths = all_shortest_paths(next, g.node_count(), s, t);
      for (const auto& p : paths)
        for (std::size_t i = 0; i + 1 < p.size(); ++i)
          eb[{std::min(p[i], p[i + 1]), std::max(p[i], p[i + 1])}] += 1.0 / static_cast<double>(paths.size());
    }
  return eb;
}

// reach[u][v]: a directed path (possibly empty) leads from u to v.
inline std::vector<std::vector<bool>> transitive_closure(const Digraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (NodeIndex v = 0; v < n; ++v) r[v][v] = true;
  for (auto [u, v] : g.edges()) r[u][v] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  return r;
}

// Leading eigenvector (largest real eigenvalue) of a nonnegative matrix,
// sign-fixed to be nonnegative and normalised to unit 2-norm.
inline Eigen::VectorXd perron_vector(const Eigen::MatrixXd& m, double* eigenvalue = nullptr) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i].real() > es.eigenvalues()[best].real()) best = i;
  if (eigenvalue) *eigenvalue = es.eigenvalues()[best].real();
  Eigen::VectorXd v = es.eigenvectors().col(best).real();
  if (v.sum() < 0) v = -v;
  return v / v.norm();
}

inline Eigen::MatrixXd adjacency(const Digraph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.node_count()),
                                            static_cast<Eigen::Index>(g.node_count()));
  for (auto [u, v] : g.edges()) a(u, v) = 1.0;
  return a;
}

// Eigenvector in-centrality from a dense solve of A^T.
inline std::map<std::string, double> eigen_in(const Digraph& g) {
  Eigen::VectorXd v = perron_vector(adjacency(g).transpose());
  std::map<std::string, double> out;
  for (NodeIndex i = 0; i < g.node_count(); ++i) out[g.name(i)] = v(i);
  return out;
}

// Non-backtracking in-centrality: dense B on the reversed graph's edges,
// leading eigenvector, summed over each node's out-edges.
inline std::map<std::string, double> nonbacktracking_in(const Digraph& g) {
  Digraph h = g.reversed();
  auto edges = h.edges();
  const auto m = static_cast<Eigen::Index>(edges.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index e = 0; e < m; ++e)
    for (Eigen::Index f = 0; f < m; ++f)
      if (edges[static_cast<std::size_t>(e)].second == edges[static_cast<std::size_t>(f)].first &&
          edges[static_cast<std::size_t>(e)].first != edges[static_cast<std::size_t>(f)].second)
        b(e, f) = 1.0;
  Eigen::VectorXd v = perron_vector(b);
  std::vector<double> c(h.node_count(), 0.0);
  for (Eigen::Index e = 0; e < m; ++e) c[edges[static_cast<std::size_t>(e)].first] += v(e);
  double norm = 0;
  for (double x : c) norm += x * x;
  norm = std::sqrt(norm);
  std::map<std::string, double> out;
  for (NodeIndex i = 0; i < h.node_count(); ++i) out[h.name(i)] = c[i] / norm;
  return out;
}

// True when every pair the reference separates by more than tie_tol is
// ordered the same way by `ours` (Kendall tau of 1 on untied pairs).
inline bool concordant(const std::map<std::string, double>& ref, const std::map<std::string, double>& ours,
                       double tie_tol) {
  for (const auto& [a, ra] : ref)
    for (const auto& [b, rb] : ref) {
      if (ra - rb <= tie_tol) continue;
      if (!(ours.at(a) > ours.at(b))) return false;
    }
  return true;
}

inline double max_abs_diff(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  double d = 0;
  for (const auto& [k, v] : a) d = std::max(d, std::abs(v - b.at(k)));
  return d;
}

// L1-penalized logistic regression by cyclic coordinate descent with a
// one-dimensional proximal Newton step per coordinate (quadratic bound 1/4).
inline std::vector<double> lasso_cd(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                                    double lambda, int sweeps = 20000) {
  const std::size_t n = x.size(), p = x.empty() ? 0 : x[0].size();
  double ybar = 0;
  for (double v : y) ybar += v;
  ybar /= static_cast<double>(n);
  double b0 = std::log(ybar / (1 - ybar));
  std::vector<double> b(p, 0.0), z(n, b0);
  auto sig = [](double t) { return 1.0 / (1.0 + std::exp(-t)); };
  for (int s = 0; s < sweeps; ++s) {
    double change = 0;
    double g0 = 0;
    for (std::size_t i = 0; i < n; ++i) g0 += sig(z[i]) - y[i];
    double d0 = -4.0 * g0 / static_cast<double>(n);
    b0 += d0;
    for (std::size_t i = 0; i < n; ++i) z[i] += d0;
    change = std::max(change, std::abs(d0));
    for (std::size_t j = 0; j < p; ++j) {
      double g = 0, h = 0;
      for (std::size_t i = 0; i < n; ++i) {
        g += (sig(z[i]) - y[i]) * x[i][j];
        h += x[i][j] * x[i][j];
      }
      g /= static_cast<double>(n);
      h /= 4.0 * static_cast<double>(n);
      if (h == 0) continue;
      double t = b[j] - g / h;
      double nb = std::copysign(std::max(std::abs(t) - lambda / h, 0.0), t);
      double d = nb - b[j];
      if (d != 0)
        for (std::size_t i = 0; i < n; ++i) z[i] += d * x[i][j];
      b[j] = nb;
      change = std::max(change, std::abs(d));
    }
    if (change < 1e-12) break;
  }
  return b;
}

}  // namespace oracle
