#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "dgtrace/error.hpp"
#include "dgtrace/selection/ensemble.hpp"
#include "dgtrace/selection/select.hpp"
#include "dgtrace/selection/stats.hpp"

namespace dgtrace::selection {

// Dense design for L1-penalized logistic regression: N rows, p features,
// row-major, plus 0/1 labels.
struct LogisticProblem {
  std::size_t n = 0, p = 0;
  std::vector<double> x;
  std::vector<double> y;

  double at(std::size_t i, std::size_t j) const { return x[i * p + j]; }
};

struct LassoFit {
  double lambda = 0.0;
  double intercept = 0.0;
  std::vector<double> beta;
  int iterations = 0;
  bool converged = false;

  std::size_t nnz(double zero_tol = 1e-10) const {
    return static_cast<std::size_t>(
        std::count_if(beta.begin(), beta.end(), [&](double b) { return std::abs(b) > zero_tol; }));
  }
};

struct LassoOptions {
  double tol = 1e-10;       // max coefficient change between iterates
  int max_iter = 20000;
  int max_bisection = 40;
  double band = 2.0;        // accepted |nnz - target|
  double lambda_min_ratio = 1e-4;
};

struct LassoProbe {
  double lambda;
  std::size_t nnz;
};

namespace detail {

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// Gradient of the mean logistic loss: g0 for the intercept, g for beta.
inline void logistic_gradient(const LogisticProblem& pr, double b0, const std::vector<double>& b, double& g0,
                              std::vector<double>& g) {
  g0 = 0.0;
  std::fill(g.begin(), g.end(), 0.0);
  for (std::size_t i = 0; i < pr.n; ++i) {
    double z = b0;
    for (std::size_t j = 0; j < pr.p; ++j) z += pr.at(i, j) * b[j];
    double r = sigmoid(z) - pr.y[i];
    g0 += r;
    for (std::size_t j = 0; j < pr.p; ++j) g[j] += r * pr.at(i, j);
  }
  const double inv = 1.0 / static_cast<double>(pr.n);
  g0 *= inv;
  for (double& v : g) v *= inv;
}

// Largest squared singular value of [1 X], by power iteration on its Gram
// matrix, padded by 5% so it stays an upper bound.
inline double design_norm_sq(const LogisticProblem& pr) {
  const std::size_t q = pr.p + 1;
  std::vector<double> v(q, 1.0), w(q), u(pr.n);
  double est = 0.0;
  for (int it = 0; it < 300; ++it) {
    for (std::size_t i = 0; i < pr.n; ++i) {
      double s = v[0];
      for (std::size_t j = 0; j < pr.p; ++j) s += pr.at(i, j) * v[j + 1];
      u[i] = s;
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < pr.n; ++i) {
      w[0] += u[i];
      for (std::size_t j = 0; j < pr.p; ++j) w[j + 1] += pr.at(i, j) * u[i];
    }
    double nw = 0.0, nv = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
      nw += w[j] * w[j];
      nv += v[j] * v[j];
    }
    est = std::sqrt(nw / nv);
    for (std::size_t j = 0; j < q; ++j) v[j] = w[j] / std::sqrt(nw);
  }
  return est * 1.05;
}

inline double logit_of_mean(const LogisticProblem& pr) {
  double ybar = stats::mean(pr.y);
  return std::log(ybar / (1.0 - ybar));
}

}  // namespace detail

// Smallest lambda at which every coefficient is zero: the max absolute
// gradient at beta = 0 with the intercept at its optimum.
inline double lambda_max(const LogisticProblem& pr) {
  double g0;
  std::vector<double> g(pr.p);
  detail::logistic_gradient(pr, detail::logit_of_mean(pr), std::vector<double>(pr.p, 0.0), g0, g);
  double m = 0.0;
  for (double v : g) m = std::max(m, std::abs(v));
  return m;
}

// Minimizes mean logistic loss + lambda * ||beta||_1 (intercept unpenalized)
// by accelerated proximal gradient with step 1/L, L = ||[1 X]||^2 / (4N).
// Momentum restarts whenever it points against the last step.
inline LassoFit lasso_fit(const LogisticProblem& pr, double lambda, const LassoOptions& opt = {}) {
  const double L = detail::design_norm_sq(pr) / (4.0 * static_cast<double>(pr.n));
  const double t = 1.0 / L;
  LassoFit f;
  f.lambda = lambda;
  f.intercept = detail::logit_of_mean(pr);
  f.beta.assign(pr.p, 0.0);
  double yb0 = f.intercept, g0;
  std::vector<double> yb = f.beta, g(pr.p), next(pr.p);
  double momentum = 1.0;
  for (int it = 1; it <= opt.max_iter; ++it) {
    detail::logistic_gradient(pr, yb0, yb, g0, g);
    double n0 = yb0 - t * g0;
    double delta = std::abs(n0 - f.intercept);
    for (std::size_t j = 0; j < pr.p; ++j) {
      double z = yb[j] - t * g[j];
      double s = std::max(std::abs(z) - t * lambda, 0.0);
      next[j] = z < 0 ? -s : s;
      delta = std::max(delta, std::abs(next[j] - f.beta[j]));
    }
    double direction = (yb0 - n0) * (n0 - f.intercept);
    for (std::size_t j = 0; j < pr.p; ++j) direction += (yb[j] - next[j]) * (next[j] - f.beta[j]);
    double m_next = (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum)) / 2.0;
    double w = (momentum - 1.0) / m_next;
    if (direction > 0) {
      w = 0.0;
      m_next = 1.0;
    }
    yb0 = n0 + w * (n0 - f.intercept);
    for (std::size_t j = 0; j < pr.p; ++j) yb[j] = next[j] + w * (next[j] - f.beta[j]);
    f.intercept = n0;
    f.beta.swap(next);
    momentum = m_next;
    f.iterations = it;
    if (delta < opt.tol) {
      f.converged = true;
      break;
    }
  }
  return f;
}

// Ensemble rows labelled 0, experiment rows 1; each feature standardized over
// the pooled rows (constant features become zero columns).
inline LogisticProblem make_logistic_problem(const EnsembleTable& t) {
  LogisticProblem pr;
  const std::size_t e = t.ensemble_size(), x = t.experiment_size();
  pr.n = e + x;
  pr.p = t.variables.size();
  pr.x.assign(pr.n * pr.p, 0.0);
  pr.y.assign(pr.n, 0.0);
  for (std::size_t i = e; i < pr.n; ++i) pr.y[i] = 1.0;
  for (std::size_t j = 0; j < pr.p; ++j) {
    std::vector<double> col = t.ensemble.at(t.variables[j]);
    const auto& ex = t.experiment.at(t.variables[j]);
    col.insert(col.end(), ex.begin(), ex.end());
    double mu = stats::mean(col), sd = stats::sample_std(col);
    for (std::size_t i = 0; i < pr.n; ++i) pr.x[i * pr.p + j] = sd > 0 ? (col[i] - mu) / sd : 0.0;
  }
  return pr;
}

// Tunes lambda by bisection on log(lambda) over [ratio * lambda_max,
// lambda_max] until the nonzero count is within the band of target_count.
// On failure returns the closest fit seen (ties favour more variables) and
// sets tuning_failed.
inline SelectionResult lasso_select(const EnsembleTable& t, std::size_t target_count,
                                    const LassoOptions& opt = {}, std::vector<LassoProbe>* path = nullptr) {
  t.validate();
  if (target_count < 1) throw InputError("lasso: target count must be at least 1");
  if (t.ensemble_size() == 0 || t.experiment_size() == 0) throw DegenerateLabels("lasso: one class is empty");
  if (t.ensemble_size() + t.experiment_size() < 8) throw InputError("lasso: needs at least 8 samples in total");

  LogisticProblem pr = make_logistic_problem(t);
  const double target = static_cast<double>(target_count);
  double hi = lambda_max(pr);
  double lo = hi * opt.lambda_min_ratio;

  LassoFit best;
  bool have_best = false;
  bool success = false;
  auto consider = [&](const LassoFit& f) {
    if (path) path->push_back({f.lambda, f.nnz()});
    if (!have_best) {
      best = f;
      have_best = true;
      return;
    }
    double d = std::abs(static_cast<double>(f.nnz()) - target);
    double db = std::abs(static_cast<double>(best.nnz()) - target);
    if (d < db || (d == db && f.nnz() > best.nnz())) best = f;
  };
  for (int step = 0; step < opt.max_bisection && hi > 0; ++step) {
    double mid = std::sqrt(lo * hi);
    LassoFit f = lasso_fit(pr, mid, opt);
    consider(f);
    double nnz = static_cast<double>(f.nnz());
    if (std::abs(nnz - target) <= opt.band) {
      best = f;
      success = true;
      break;
    }
    if (nnz > target)
      lo = mid;
    else
      hi = mid;
  }
  if (!have_best) consider(lasso_fit(pr, hi, opt));

  SelectionResult r;
  r.method = SelectionMethod::lasso;
  r.lambda = best.lambda;
  r.tuning_failed = !success;
  for (std::size_t j = 0; j < pr.p; ++j)
    if (std::abs(best.beta[j]) > 1e-10) r.ranked.emplace_back(t.variables[j], std::abs(best.beta[j]));
  sort_ranked(r.ranked);
  if (!success)
    r.warnings.push_back({Severity::warning, "", 0,
                          "lasso tuning failed: closest count " + std::to_string(best.nnz()) + " for target " +
                              std::to_string(target_count)});
  return r;
}

}  // namespace dgtrace::selection
