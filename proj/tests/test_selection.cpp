#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "dgtrace/selection/ensemble.hpp"
#include "dgtrace/selection/lasso.hpp"
#include "dgtrace/selection/select.hpp"
#include "dgtrace/selection/stats.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace dgtrace;
using namespace dgtrace::selection;

namespace {

EnsembleTable single_run_table(const std::vector<std::pair<std::string, std::pair<double, double>>>& rows) {
  EnsembleTable t;
  for (const auto& [v, ex] : rows) {
    t.add(v, Role::ensemble, std::vector<double>{ex.first, ex.first + 1, ex.first + 2});
    t.add(v, Role::experiment, ex.second);
  }
  return t;
}

// Sorted-array quantile with linear interpolation between closest ranks.
double ref_quantile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  double h = (static_cast<double>(x.size()) - 1) * p;
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - std::floor(h)) * (x[hi] - x[lo]);
}

std::vector<std::pair<std::string, double>> ref_median_distance(const EnsembleTable& t) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& v : t.variables) {
    const auto& e = t.ensemble.at(v);
    const auto& x = t.experiment.at(v);
    double mu = 0;
    for (double a : e) mu += a;
    mu /= static_cast<double>(e.size());
    double ss = 0;
    for (double a : e) ss += (a - mu) * (a - mu);
    double sd = std::sqrt(ss / static_cast<double>(e.size() - 1));
    std::vector<double> ze, zx;
    for (double a : e) ze.push_back((a - mu) / sd);
    for (double a : x) zx.push_back((a - mu) / sd);
    bool disjoint = ref_quantile(zx, 0.75) < ref_quantile(ze, 0.25) || ref_quantile(zx, 0.25) > ref_quantile(ze, 0.75);
    if (disjoint) out.emplace_back(v, std::abs(ref_quantile(zx, 0.5) - ref_quantile(ze, 0.5)));
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.second > b.second; });
  return out;
}

std::vector<std::vector<double>> rows_of(const LogisticProblem& pr) {
  std::vector<std::vector<double>> x(pr.n, std::vector<double>(pr.p));
  for (std::size_t i = 0; i < pr.n; ++i)
    for (std::size_t j = 0; j < pr.p; ++j) x[i][j] = pr.at(i, j);
  return x;
}

EnsembleTable separating_table() {
  oracle::Rng rng(71);
  EnsembleTable t;
  std::vector<double> se, sx;
  for (int i = 0; i < 30; ++i) se.push_back(-1.0 - rng.unit());
  for (int i = 0; i < 15; ++i) sx.push_back(1.0 + rng.unit());
  for (int k = 0; k < 12; ++k) {
    std::string name = "noise" + std::string(k < 10 ? "0" : "") + std::to_string(k);
    std::vector<double> a, b;
    for (int i = 0; i < 30; ++i) a.push_back(rng.normal());
    for (int i = 0; i < 15; ++i) b.push_back(rng.normal());
    t.add(name, Role::ensemble, a);
    t.add(name, Role::experiment, b);
  }
  t.add("sep", Role::ensemble, se);
  t.add("sep", Role::experiment, sx);
  return t;
}

}  // namespace

TEST(Stats, QuartilesLinearInterpolation) {
  EXPECT_DOUBLE_EQ(stats::quantile({1, 2, 3, 4}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(stats::quantile({1, 2, 3, 4}, 0.75), 3.25);
  EXPECT_DOUBLE_EQ(stats::quantile({4, 1, 3, 2, 5}, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(stats::quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.1), 1.9);
  EXPECT_DOUBLE_EQ(stats::median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(stats::median({3, 1, 2, 10}), 2.5);
}

TEST(Stats, MeanAndSampleStd) {
  std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(stats::mean(x), 5.0);
  EXPECT_NEAR(stats::sample_std(x), std::sqrt(32.0 / 7.0), 1e-15);
}

TEST(EnsembleCsv, RoundTrip) {
  auto t = support::shifted_table(5, 4, 6, 3, {1.0});
  auto back = parse_ensemble_csv(to_csv(t));
  EXPECT_EQ(back.variables, t.variables);
  EXPECT_EQ(back.ensemble, t.ensemble);
  EXPECT_EQ(back.experiment, t.experiment);
}

TEST(EnsembleCsv, RowsAppend) {
  auto t = parse_ensemble_csv("variable,role,values\nx,ensemble,1,2\nx,ensemble,3\nx,experiment,9\n");
  EXPECT_EQ(t.ensemble.at("x"), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(t.experiment.at("x"), (std::vector<double>{9}));
}

TEST(EnsembleCsv, Errors) {
  EXPECT_THROW(parse_ensemble_csv(""), InputError);
  EXPECT_THROW(parse_ensemble_csv("name,kind\nx,ensemble,1\n"), InputError);
  EXPECT_THROW(parse_ensemble_csv("variable,role\nx,control,1,2,3\n"), InputError);
  EXPECT_THROW(parse_ensemble_csv("variable,role\nx,ensemble,1,zz,3\nx,experiment,1\n"), InputError);
  EXPECT_THROW(parse_ensemble_csv("variable,role\nx,ensemble,1,2\nx,experiment,1\n"), InputError);
  EXPECT_THROW(parse_ensemble_csv("variable,role\nx,ensemble,1,2,3\nx,experiment,1\ny,ensemble,1,2\ny,experiment,1\n"),
               InputError);
}

TEST(RawDiff, IdenticalIsEmpty) {
  auto t = single_run_table({{"a", {1.0, 1.0}}, {"b", {2.0, 2.0}}});
  EXPECT_TRUE(raw_diff(t, 0, 0, 1e-6).ranked.empty());
}

TEST(RawDiff, SingleTenPercent) {
  auto t = single_run_table({{"a", {1.0, 1.0}}, {"b", {2.0, 2.2}}, {"c", {5.0, 5.0}}});
  auto r = raw_diff(t, 0, 0, 1e-6);
  ASSERT_EQ(r.names(), (std::vector<std::string>{"b"}));
  EXPECT_NEAR(r.ranked[0].second, 0.1, 1e-12);
}

TEST(RawDiff, ThreePerturbedOfForty) {
  std::vector<std::pair<std::string, std::pair<double, double>>> rows;
  for (int i = 0; i < 40; ++i) {
    double base = 1.0 + i;
    double run = base;
    if (i == 4) run = base * 1.3;
    if (i == 17) run = base * 0.95;
    if (i == 33) run = base * 1.01;
    rows.push_back({"v" + std::to_string(i), {base, run}});
  }
  auto r = raw_diff(single_run_table(rows), 0, 0, 1e-9);
  EXPECT_EQ(r.names(), (std::vector<std::string>{"v4", "v17", "v33"}));
  EXPECT_NEAR(r.ranked[0].second, 0.3, 1e-12);
  EXPECT_NEAR(r.ranked[1].second, 0.05, 1e-12);
  EXPECT_NEAR(r.ranked[2].second, 0.01, 1e-12);
}

TEST(RawDiff, ZeroToleranceReturnsAllDistinct) {
  auto t = support::shifted_table(9, 12, 5, 2, {});
  EXPECT_EQ(raw_diff(t, 1, 1, 0.0).ranked.size(), 12u);
}

TEST(RawDiff, IndexOutOfRange) {
  auto t = single_run_table({{"a", {1.0, 1.0}}});
  EXPECT_THROW(raw_diff(t, 3, 0, 0.0), InputError);
}

TEST(MedianDistance, SameDistributionSelectsNothing) {
  EnsembleTable t;
  oracle::Rng rng(81);
  for (int v = 0; v < 10; ++v) {
    std::vector<double> e;
    for (int i = 0; i < 40; ++i) e.push_back(rng.normal());
    t.add("v" + std::to_string(v), Role::ensemble, e);
    t.add("v" + std::to_string(v), Role::experiment, e);
  }
  EXPECT_TRUE(median_distance(t).ranked.empty());
}

TEST(MedianDistance, DominantOutlierRatio) {
  auto r = median_distance(support::dominant_outlier_table());
  ASSERT_GE(r.ranked.size(), 2u);
  EXPECT_EQ(r.ranked[0].first, "var07");
  EXPECT_EQ(r.ranked[1].first, "var21");
  EXPECT_GT(r.ranked[0].second / r.ranked[1].second, 1000.0);
}

TEST(MedianDistance, FiveShiftedMatchesQuartileOracle) {
  std::vector<double> shifts(40, 0.0);
  shifts[3] = 3.0;
  shifts[11] = 4.5;
  shifts[19] = 2.5;
  shifts[26] = 6.0;
  shifts[38] = 3.7;
  auto t = support::shifted_table(83, 40, 40, 20, shifts);
  auto r = median_distance(t);
  auto ref = ref_median_distance(t);
  EXPECT_EQ(r.names(), (std::vector<std::string>{"var26", "var11", "var38", "var03", "var19"}));
  ASSERT_EQ(r.ranked.size(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    EXPECT_EQ(r.ranked[i].first, ref[i].first);
    EXPECT_NEAR(r.ranked[i].second, ref[i].second, 1e-12);
  }
}

TEST(MedianDistance, ZeroVarianceExcludedWithWarning) {
  auto t = support::shifted_table(84, 3, 10, 5, {5.0});
  t.ensemble["var01"] = std::vector<double>(10, 2.0);
  auto r = median_distance(t);
  EXPECT_EQ(r.warnings.size(), 1u);
  for (const auto& n : r.names()) EXPECT_NE(n, "var01");
}

TEST(MedianDistanceProperty, AffineInvariance) {
  oracle::Rng rng(85);
  for (int c = 0; c < 10; ++c) {
    auto t = support::five_signal_table(static_cast<std::uint64_t>(c + 20));
    auto base = median_distance(t);
    auto scaled = t;
    for (const auto& v : t.variables) {
      double a = 0.1 + 10 * rng.unit(), b = 100 * rng.normal();
      for (auto* m : {&scaled.ensemble, &scaled.experiment})
        for (double& x : m->at(v)) x = a * x + b;
    }
    auto r = median_distance(scaled);
    EXPECT_EQ(r.names(), base.names());
    for (std::size_t i = 0; i < r.ranked.size(); ++i) EXPECT_NEAR(r.ranked[i].second, base.ranked[i].second, 1e-9);
  }
}

TEST(SelectionProperty, MemberPermutationInvariance) {
  oracle::Rng rng(86);
  auto t = support::five_signal_table(3);
  auto shuffled = t;
  std::vector<std::size_t> perm(t.ensemble_size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[static_cast<std::size_t>(rng.below(static_cast<int>(i) + 1))]);
  for (const auto& v : t.variables)
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled.ensemble[v][i] = t.ensemble.at(v)[perm[i]];
  auto a = median_distance(t), b = median_distance(shuffled);
  EXPECT_EQ(a.names(), b.names());
  for (std::size_t i = 0; i < a.ranked.size(); ++i) EXPECT_NEAR(a.ranked[i].second, b.ranked[i].second, 1e-12);
  auto la = lasso_select(t, 5), lb = lasso_select(shuffled, 5);
  EXPECT_EQ(la.names(), lb.names());
}

TEST(Lasso, LambdaMaxGivesNullModel) {
  auto pr = make_logistic_problem(support::five_signal_table(1));
  double lmax = lambda_max(pr);
  auto f = lasso_fit(pr, lmax);
  EXPECT_EQ(f.nnz(), 0u);
  EXPECT_NEAR(f.intercept, std::log(20.0 / 40.0), 1e-8);
  EXPECT_GT(lasso_fit(pr, lmax * 0.98).nnz(), 0u);
  EXPECT_EQ(lasso_fit(pr, lmax * 10).nnz(), 0u);
}

TEST(Lasso, MatchesCoordinateDescent) {
  auto pr = make_logistic_problem(support::five_signal_table(2));
  auto x = rows_of(pr);
  for (double frac : {0.6, 0.3, 0.1}) {
    double lambda = lambda_max(pr) * frac;
    auto ours = lasso_fit(pr, lambda);
    auto ref = oracle::lasso_cd(x, pr.y, lambda);
    for (std::size_t j = 0; j < pr.p; ++j) EXPECT_NEAR(ours.beta[j], ref[j], 1e-6) << "lambda fraction " << frac;
  }
}

TEST(Lasso, SeparatingVariableIsSoleNonzero) {
  auto t = separating_table();
  LassoOptions opt;
  opt.band = 0;
  auto r = lasso_select(t, 1, opt);
  EXPECT_FALSE(r.tuning_failed);
  EXPECT_EQ(r.names(), (std::vector<std::string>{"sep"}));

  auto pr = make_logistic_problem(t);
  auto x = rows_of(pr);
  double lmax = lambda_max(pr);
  std::size_t sep = pr.p - 1;
  for (int k = 1; k <= 20; ++k) {
    auto ref = oracle::lasso_cd(x, pr.y, lmax * (1.0 - 0.01 * k));
    std::size_t nnz = 0;
    for (double b : ref) nnz += std::abs(b) > 1e-10;
    if (nnz == 1) {
      EXPECT_GT(std::abs(ref[sep]), 1e-10);
      break;
    }
  }
}

TEST(Lasso, TiedBlockFailsTuningWithTen) {
  auto r = lasso_select(support::tied_block_table(), 5);
  EXPECT_TRUE(r.tuning_failed);
  EXPECT_EQ(r.ranked.size(), 10u);
  for (const auto& n : r.names()) EXPECT_EQ(n.rfind("copy", 0), 0u);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Lasso, TunedCountWithinBand) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto r = lasso_select(support::five_signal_table(seed), 5);
    if (r.tuning_failed) continue;
    EXPECT_LE(std::abs(static_cast<long>(r.ranked.size()) - 5), 2);
    EXPECT_TRUE(r.lambda.has_value());
  }
}

TEST(Lasso, TooFewSamples) {
  auto t = support::shifted_table(7, 3, 4, 2, {1.0});
  EXPECT_THROW(lasso_select(t, 1), InputError);
}

TEST(LassoProperty, NnzNonIncreasingInLambda) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    std::vector<LassoProbe> path;
    lasso_select(support::five_signal_table(seed), 5, {}, &path);
    std::sort(path.begin(), path.end(), [](auto& a, auto& b) { return a.lambda < b.lambda; });
    for (std::size_t i = 0; i + 1 < path.size(); ++i) EXPECT_GE(path[i].nnz, path[i + 1].nnz);
  }
}

TEST(SelectionCsv, Format) {
  SelectionResult r;
  r.ranked = {{"b", 2.5}, {"a", 1.0}};
  EXPECT_EQ(to_csv(r), "rank,variable,score\n1,b,2.5\n2,a,1\n");
}
