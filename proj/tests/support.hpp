// Fixture builders shared by the unit and acceptance tests.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dgtrace/metagraph.hpp"
#include "dgtrace/minifort/parser.hpp"
#include "dgtrace/minifort/symbols.hpp"
#include "dgtrace/selection/ensemble.hpp"
#include "dgtrace/slicer.hpp"
#include "oracles.hpp"

namespace support {

inline std::string fixture(const std::string& rel) { return std::string(DGTRACE_FIXTURES) + "/" + rel; }

inline dgtrace::minifort::SourceCorpus corpus_of(const std::vector<std::pair<std::string, std::string>>& files) {
  std::vector<dgtrace::minifort::SourceUnit> units;
  for (const auto& [name, text] : files) units.push_back(dgtrace::minifort::parse_unit(text, name));
  return dgtrace::minifort::make_corpus(std::move(units));
}

inline dgtrace::MetaGraph graph_of_corpus(const dgtrace::minifort::SourceCorpus& c) {
  return dgtrace::build_metagraph(c, dgtrace::minifort::resolve_uses(c));
}

inline dgtrace::MetaGraph graph_of(const std::vector<std::pair<std::string, std::string>>& files) {
  return graph_of_corpus(corpus_of(files));
}

inline dgtrace::MetaGraph graph_of_dir(const std::string& dir) {
  return graph_of_corpus(dgtrace::minifort::load_corpus(dir));
}

inline dgtrace::Slice slice_of(const dgtrace::MetaGraph& g, const std::string& target) {
  dgtrace::SliceRequest req;
  req.targets = {target};
  return dgtrace::backward_slice(g, req);
}

// Statements "p1 = first", "p2 = p1 * 0.5", "pk = p(k-1) + p(k-2)": a chain
// whose undirected view has no bridges.
inline std::string ladder(const std::string& p, int n, const std::string& first) {
  std::string s = "    " + p + "1 = " + first + "\n    " + p + "2 = " + p + "1 * 0.5\n";
  for (int i = 3; i <= n; ++i)
    s += "    " + p + std::to_string(i) + " = " + p + std::to_string(i - 1) + " + " + p + std::to_string(i - 2) + "\n";
  return s;
}

// One subroutine `sub` in module `mod` whose body is `body`, writing state%omega.
inline std::string module_with(const std::string& mod, const std::string& uses, const std::string& globals,
                               const std::string& sub, const std::string& body) {
  return "module " + mod + "\n" + uses + "  implicit none\n" + globals + "contains\n  subroutine " + sub +
         "(state)\n    type(model_state), intent(inout) :: state\n" + body + "  end subroutine " + sub +
         "\nend module " + mod + "\n";
}

// --- ensemble fixtures -------------------------------------------------------

// `n_vars` variables of standard normal noise; `shifts[i]` is added to the
// experimental runs of variable i.
inline dgtrace::selection::EnsembleTable shifted_table(std::uint64_t seed, int n_vars, int e, int x,
                                                       const std::vector<double>& shifts) {
  oracle::Rng rng(seed);
  dgtrace::selection::EnsembleTable t;
  for (int v = 0; v < n_vars; ++v) {
    std::string name = (v < 10 ? "var0" : "var") + std::to_string(v);
    double shift = v < static_cast<int>(shifts.size()) ? shifts[static_cast<std::size_t>(v)] : 0.0;
    std::vector<double> ens, exp;
    for (int i = 0; i < e; ++i) ens.push_back(rng.normal());
    for (int i = 0; i < x; ++i) exp.push_back(rng.normal() + shift);
    t.add(name, dgtrace::selection::Role::ensemble, ens);
    t.add(name, dgtrace::selection::Role::experiment, exp);
  }
  return t;
}

// One variable shifted 5000 standard deviations, a runner-up shifted 3, and
// 38 unshifted variables: the single-bug signature with a dominant outlier.
inline dgtrace::selection::EnsembleTable dominant_outlier_table() {
  std::vector<double> shifts(40, 0.0);
  shifts[7] = 5000.0;
  shifts[21] = 3.0;
  return shifted_table(61, 40, 30, 15, shifts);
}

// Ten copies of one shifted signal plus twenty noise variables: the lasso
// admits the copies together, so its count jumps from 0 to 10.
inline dgtrace::selection::EnsembleTable tied_block_table() {
  oracle::Rng rng(63);
  dgtrace::selection::EnsembleTable t;
  const int e = 40, x = 20;
  std::vector<double> sig_e, sig_x;
  for (int i = 0; i < e; ++i) sig_e.push_back(rng.normal());
  for (int i = 0; i < x; ++i) sig_x.push_back(rng.normal() + 1.5);
  for (int k = 0; k < 10; ++k) {
    std::string name = "copy" + std::to_string(k);
    t.add(name, dgtrace::selection::Role::ensemble, sig_e);
    t.add(name, dgtrace::selection::Role::experiment, sig_x);
  }
  for (int k = 0; k < 20; ++k) {
    std::string name = "noise" + std::string(k < 10 ? "0" : "") + std::to_string(k);
    std::vector<double> a, b;
    for (int i = 0; i < e; ++i) a.push_back(rng.normal());
    for (int i = 0; i < x; ++i) b.push_back(rng.normal());
    t.add(name, dgtrace::selection::Role::ensemble, a);
    t.add(name, dgtrace::selection::Role::experiment, b);
  }
  return t;
}

// Five shifted variables with effect sizes drawn from [0.8, 2.0] among 30,
// with 40 ensemble members and 20 experimental runs.
inline dgtrace::selection::EnsembleTable five_signal_table(std::uint64_t seed) {
  oracle::Rng rng(seed * 7919 + 1);
  std::vector<double> shifts(30, 0.0);
  std::vector<int> idx(30);
  for (int i = 0; i < 30; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int k = 0; k < 5; ++k) {
    int j = k + rng.below(30 - k);
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
    shifts[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = 0.8 + 1.2 * rng.unit();
  }
  return shifted_table(seed, 30, 40, 20, shifts);
}

}  // namespace support
