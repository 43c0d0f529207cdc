#include "vbsparse/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vbsparse/errors.hpp"
#include "vbsparse/rng.hpp"

namespace vbsparse {

namespace {

double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

struct CdProblem {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  Eigen::VectorXd col_sq_over_n;  // ||x_j||^2 / n on this (sub)problem
  int n;
  int p;
};

double objective(const CdProblem& prob, const Eigen::VectorXd& beta,
                 const Eigen::VectorXd& resid, double lambda) {
  return resid.squaredNorm() / (2.0 * prob.n) + lambda * beta.lpNorm<1>();
}

/// One coordinate pass over `idx`; returns max |delta beta_j|.
double cd_pass(const CdProblem& prob, double lambda, Eigen::VectorXd& beta,
               Eigen::VectorXd& resid, const std::vector<int>& idx) {
  double max_delta = 0.0;
  for (int j : idx) {
    const double d = prob.col_sq_over_n[j];
    if (d <= 0.0) continue;
    const double rho = prob.X.col(j).dot(resid) / prob.n + d * beta[j];
    const double bj = soft_threshold(rho, lambda) / d;
    const double delta = bj - beta[j];
    if (delta != 0.0) {
      resid -= delta * prob.X.col(j);
      beta[j] = bj;
      max_delta = std::max(max_delta, std::fabs(delta));
    }
  }
  return max_delta;
}

/// Working-set coordinate descent: sweeps run over the current working set,
/// with a full-gradient correctness pass after at most 10 sweeps that pulls
/// in any coordinate violating the subgradient condition. Terminates once
/// every KKT condition is met within kkt_exit_tol; the sweep tolerance
/// tightens automatically when a verification round fails without growing
/// the working set.
Eigen::VectorXd cd_solve(const CdProblem& prob, double lambda, Eigen::VectorXd beta,
                         const LassoOptions& opts, double coord_tol, double kkt_exit_tol,
                         int* sweeps_used) {
  Eigen::VectorXd resid = prob.y - prob.X * beta;
  std::vector<char> in_work(prob.p, 0);
  std::vector<int> work;
  for (int j = 0; j < prob.p; ++j)
    if (beta[j] != 0.0) {
      work.push_back(j);
      in_work[j] = 1;
    }

  int sweeps = 0;
  auto trace = [&]() {
    if (opts.objective_trace)
      opts.objective_trace->push_back(objective(prob, beta, resid, lambda));
  };

  double tol = coord_tol;
  while (sweeps < opts.max_sweeps) {
    bool
        work_converged = work.empty();
    for (int k = 0; k < 10 && !work_converged && sweeps < opts.max_sweeps; ++k) {
      ++sweeps;
      const double delta = cd_pass(prob, lambda, beta, resid, work);
      trace();
      work_converged = delta < tol;
    }

    const Eigen::VectorXd grad = prob.X.transpose() * resid / prob.n;
    bool kkt_ok = true;
    bool grew = false;
    for (int j = 0; j < prob.p; ++j) {
      if (beta[j] != 0.0) {
        if (std::fabs(grad[j] - lambda * (beta[j] > 0 ? 1.0 : -1.0)) > kkt_exit_tol)
          kkt_ok = false;
      } else if (std::fabs(grad[j]) > lambda + kkt_exit_tol) {
        kkt_ok = false;
        if (!in_work[j]) {
          work.push_back(j);
          in_work[j] = 1;
          grew = true;
        }
      }
    }
    if (kkt_ok) break;
    if (!grew && work_converged) tol = std::max(tol * 0.1, 1e-15);
  }
  if (sweeps >= opts.max_sweeps) throw NonConvergence(opts.max_sweeps);
  if (sweeps_used) *sweeps_used += sweeps;
  return beta;
}

bool kkt_satisfied(const CdProblem& prob, double lambda, const Eigen::VectorXd& beta,
                   double tol) {
  const Eigen::VectorXd resid = prob.y - prob.X * beta;
  const Eigen::VectorXd grad = prob.X.transpose() * resid / prob.n;
  for (int j = 0; j < prob.p; ++j) {
    if (beta[j] != 0.0) {
      if (std::fabs(grad[j] - lambda * (beta[j] > 0 ? 1.0 : -1.0)) > tol) return false;
    } else if (std::fabs(grad[j]) > lambda + tol) {
      return false;
    }
  }
  return true;
}

std::vector<double> lambda_grid(double lam_max, const LassoOptions& opts) {
  std::vector<double> grid(opts.cv_grid_size);
  const double lam_min = lam_max * opts.cv_lambda_min_ratio;
  for (int k = 0; k < opts.cv_grid_size; ++k) {
    const double t = opts.cv_grid_size == 1
                         ? 0.0
                         : static_cast<double>(k) / (opts.cv_grid_size - 1);
    grid[k] = lam_max * std::pow(lam_min / lam_max, t);
  }
  return grid;  // decreasing
}

constexpr double kCvTol = 1e-7;  // path fits inside CV; final fit uses coord_tol

/// Index into lambda_grid minimizing 5-fold CV prediction error.
std::size_t select_lambda_cv(const Dataset& data, const LassoOptions& opts) {
  const int n = data.n;
  const int p = data.p;
  const std::vector<double> grid = lambda_grid(lambda_max(data), opts);

  // contiguous fold blocks under a seed-fixed shuffle
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::for_stream(opts.cv_shuffle_seed, 0);
  for (int i = n - 1; i > 0; --i) {
    const int k = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[k]);
  }

  const int folds = std::min(opts.cv_folds, n);
  std::vector<double> cv_err(grid.size(), 0.0);
  std::vector<std::vector<double>> fold_mse(grid.size(), std::vector<double>(folds, 0.0));
  for (int f = 0; f < folds; ++f) {
    const int lo = static_cast<int>(static_cast<long long>(f) * n / folds);
    const int hi = static_cast<int>(static_cast<long long>(f + 1) * n / folds);
    const int n_te = hi - lo;
    const int n_tr = n - n_te;
    Eigen::MatrixXd Xtr(n_tr, p), Xte(n_te, p);
    Eigen::VectorXd ytr(n_tr), yte(n_te);
    int r_tr = 0, r_te = 0;
    for (int i = 0; i < n; ++i) {
      const int row = order[i];
      if (i >= lo && i < hi) {
        Xte.row(r_te) = data.X.row(row);
        yte[r_te++] = data.y[row];
      } else {
        Xtr.row(r_tr) = data.X.row(row);
        ytr[r_tr++] = data.y[row];
      }
    }
    const double ytr_mean = ytr.mean();
    ytr.array() -= ytr_mean;

    CdProblem prob{Xtr, ytr, Eigen::VectorXd(p), n_tr, p};
    for (int j = 0; j < p; ++j) prob.col_sq_over_n[j] = Xtr.col(j).squaredNorm() / n_tr;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);  // warm start down the path
    for (std::size_t k = 0; k < grid.size(); ++k) {
      beta = cd_solve(prob, grid[k], std::move(beta), opts, kCvTol, 1e-4, nullptr);
      const Eigen::VectorXd pred = Xte * beta;
      const double err = (yte.array() - ytr_mean - pred.array()).square().sum();
      cv_err[k] += err;
      fold_mse[k][f] = err / n_te;
    }
  }

  if (opts.cv_errors) *opts.cv_errors = cv_err;

  // one-standard-error rule: the largest (sparsest) lambda whose mean CV
  // error is within one SE of the minimum. The plain minimizer wanders on
  // flat error curves, all the way to the interpolation end on hard problems.
  std::vector<double> mean_err(grid.size()), se_err(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double m = 0.0;
    for (int f = 0; f < folds; ++f) m += fold_mse[k][f];
    m /= folds;
    double ss = 0.0;
    for (int f = 0; f < folds; ++f) ss += (fold_mse[k][f] - m) * (fold_mse[k][f] - m);
    mean_err[k] = m;
    se_err[k] = folds > 1 ? std::sqrt(ss / (folds - 1)) / std::sqrt(folds) : 0.0;
  }
  std::size_t kmin = 0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (mean_err[k] < mean_err[kmin]) kmin = k;
  const double cutoff = mean_err[kmin] + se_err[kmin];
  // grid is decreasing, so the first qualifying index is the largest lambda;
  // exact ties in mean error therefore also resolve toward the sparser model
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (mean_err[k] <= cutoff) return k;
  return kmin;
}

LassoFit fit_at_lambda(const Dataset& data, double lam, const LassoOptions& opts) {
  CdProblem prob{data.X, data.y, data.col_sqnorms / data.n, data.n, data.p};

  // short warm-start path down to the target penalty
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(data.p);
  const double lam_hi = lambda_max(data);
  int total_sweeps = 0;
  if (lam < lam_hi) {
    const int steps = 8;
    for (int k = 1; k < steps; ++k) {
      const double l = lam_hi * std::pow(lam / lam_hi, static_cast<double>(k) / steps);
      beta = cd_solve(prob, l, std::move(beta), opts, kCvTol, 1e-4, &total_sweeps);
    }
  }
  beta = cd_solve(prob, lam, std::move(beta), opts, opts.coord_tol, 0.5 * opts.kkt_tol, &total_sweeps);
  if (!kkt_satisfied(prob, lam, beta, opts.kkt_tol)) throw NonConvergence(total_sweeps);

  LassoFit fit;
  fit.beta_tilde = std::move(beta);
  for (int j = 0; j < data.p; ++j)
    if (fit.beta_tilde[j] != 0.0) fit.active_set.push_back(j);
  fit.lambda = lam;
  fit.n_iter = total_sweeps;
  return fit;
}

}  // namespace

double lambda_max(const Dataset& data) {
  return data.xty.cwiseAbs().maxCoeff() / data.n;
}

LassoFit lasso_fit(const Dataset& data, std::optional<double> lambda,
                   const LassoOptions& opts) {
  if (lambda) {
    if (!(*lambda > 0.0)) throw InvalidSpec("lasso lambda must be positive");
    LassoFit fit = fit_at_lambda(data, *lambda, opts);
    fit.sigma2_hat = estimate_sigma2(data, fit);
    return fit;
  }

  const std::vector<double> grid = lambda_grid(lambda_max(data), opts);
  std::size_t k = select_lambda_cv(data, opts);
  LassoFit fit = fit_at_lambda(data, grid[k], opts);
  // saturation guard: if the CV winner sits at the interpolation end of the
  // path, walk back up the (decreasing) grid until the active set leaves a
  // usable residual df; the estimator behind sigma2_hat is meaningless there
  const int cap = std::max(1, static_cast<int>(opts.cv_saturation_frac * data.n));
  while (static_cast<int>(fit.active_set.size()) > cap && k > 0)
    fit = fit_at_lambda(data, grid[--k], opts);
  fit.sigma2_hat = estimate_sigma2(data, fit);
  return fit;
}

double estimate_sigma2(const Dataset& data, const LassoFit& fit) {
  const int size = static_cast<int>(fit.active_set.size());
  if (size >= data.n)
    throw DegenerateFit("lasso active set has " + std::to_string(size) +
                        " members with only n = " + std::to_string(data.n) + " rows");
  const double rss = (data.y - data.X * fit.beta_tilde).squaredNorm();
  return std::max(rss / (data.n - size), 1e-8);
}

}  // namespace vbsparse
