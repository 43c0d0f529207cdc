#include "vbsparse/posterior.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "vbsparse/errors.hpp"

namespace vbsparse {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// ||y - yhat_S||^2 with yhat_S the least squares fit on the S columns.
double residual_ss(const Dataset& data, const std::vector<int>& S) {
  if (S.empty()) return data.y.squaredNorm();
  const int s = static_cast<int>(S.size());
  Eigen::MatrixXd sub(data.n, s);
  Eigen::VectorXd xty(s);
  for (int k = 0; k < s; ++k) {
    sub.col(k) = data.X.col(S[k]);
    xty[k] = data.xty[S[k]];
  }
  Eigen::MatrixXd gram = sub.transpose() * sub;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    std::fprintf(stderr, "vbsparse: note: jittering Gram matrix (|S|=%d)\n", s);
    gram.diagonal().array() += 1e-10 * data.n;
    llt.compute(gram);
    if (llt.info() != Eigen::Success)
      throw SingularSubmatrix("normal equations singular for |S| = " + std::to_string(s));
  }
  const Eigen::VectorXd coef = llt.solve(xty);
  return (data.y - sub * coef).squaredNorm();
}

Eigen::VectorXd softmax(const Eigen::VectorXd& log_w) {
  double best = kNegInf;
  for (int i = 0; i < log_w.size(); ++i) best = std::max(best, log_w[i]);
  if (best == kNegInf)
    throw AllWeightsDegenerate("every grid point received zero posterior mass");
  Eigen::VectorXd w(log_w.size());
  double total = 0.0;
  for (int i = 0; i < log_w.size(); ++i) {
    w[i] = log_w[i] == kNegInf ? 0.0 : std::exp(log_w[i] - best);
    total += w[i];
  }
  return w / total;
}

}  // namespace

double log_config_score(const Dataset& data, const std::vector<int>& S,
                        const PriorConfig& prior) {
  const int s = static_cast<int>(S.size());
  if (s > data.n)
    throw SizeOverCap("|S| = " + std::to_string(s) + " exceeds the size-prior cap n = " +
                      std::to_string(data.n));
  const double rss = residual_ss(data, S);
  const double log_prior =
      -log_choose(data.p, s) - s * (std::log(prior.c) + prior.a * std::log(data.p));
  return log_prior + 0.5 * s * std::log(prior.gamma / (prior.alpha + prior.gamma)) -
         (prior.a0 + prior.alpha * data.n / 2.0) *
             std::log(prior.b0 + 0.5 * prior.alpha * rss);
}

FitResult fit_vb_empirical(const Dataset& data, const PriorConfig& prior,
                           const LassoFit& lasso,
                           std::optional<Eigen::VectorXd> sigma2_grid) {
  FitResult fit;
  fit.lasso = lasso;
  fit.prior = prior;

  Eigen::VectorXd grid;
  if (sigma2_grid) {
    grid = *sigma2_grid;
    if (grid.size() == 0) throw InvalidSpec("explicit sigma2 grid is empty");
  } else {
    const double lo = prior.grid_lo_frac * lasso.sigma2_hat;
    const double hi = prior.grid_hi_frac * lasso.sigma2_hat;
    if (prior.L < 1) throw InvalidSpec("grid size L must be positive");
    grid.resize(prior.L);
    if (prior.L == 1) {
      grid[0] = 0.5 * (lo + hi);
    } else {
      for (int l = 0; l < prior.L; ++l)
        grid[l] = lo + (hi - lo) * static_cast<double>(l) / (prior.L - 1);
    }
  }

  const GScalar g = geometric_mean_eigs(data, lasso.active_set);
  const int L = static_cast<int>(grid.size());

  fit.grid.sigma2_grid = grid;
  fit.grid.states.resize(L);
  fit.grid.selected_sets.resize(L);
  fit.grid.diagnostics.resize(L);
  fit.grid.log_weights.resize(L);

  for (int l = L - 1; l >= 0; --l) {
    CaviResult run = cavi_fixed_sigma(data, prior, grid[l], g, lasso.beta_tilde,
                                      init_state(data, prior, grid[l], lasso.beta_tilde));
    std::vector<int> selected;
    for (int j = 0; j < data.p; ++j)
      if (run.state.phi[j] > 0.5) selected.push_back(j);

    double log_w = kNegInf;
    if (static_cast<int>(selected.size()) <= data.n) {
      try {
        log_w = log_config_score(data, selected, prior);
      } catch (const SingularSubmatrix&) {
        std::fprintf(stderr, "vbsparse: note: singular selected set at grid %d dropped\n", l);
      }
    }
    fit.grid.log_weights[l] = log_w;
    fit.grid.states[l] = std::move(run.state);
    fit.grid.selected_sets[l] = std::move(selected);
    fit.grid.diagnostics[l] = std::move(run.diagnostics);
  }
  fit.grid.weights = softmax(fit.grid.log_weights);

  fit.mu = Eigen::VectorXd::Zero(data.p);
  fit.tau2 = Eigen::VectorXd::Zero(data.p);
  fit.phi = Eigen::VectorXd::Zero(data.p);
  for (int l = 0; l < L; ++l) {
    const double w = fit.grid.weights[l];
    if (w == 0.0) continue;
    fit.mu += w * fit.grid.states[l].mu;
    fit.tau2 += w * fit.grid.states[l].tau2;
    fit.phi += w * fit.grid.states[l].phi;
  }

  fit.beta_hat = fit.phi.cwiseProduct(fit.mu);
  for (int j = 0; j < data.p; ++j)
    if (fit.phi[j] > 0.5) fit.S_hat.push_back(j);

  fit.beta_hat_raw = fit.beta_hat.cwiseQuotient(data.col_scales);
  fit.intercept_raw = data.y_mean - fit.beta_hat_raw.dot(data.col_means);
  return fit;
}

}  // namespace vbsparse
