#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "vbsparse/data.hpp"
#include "vbsparse/lasso.hpp"
#include "vbsparse/vb.hpp"

namespace vbsparse {

/// Per-grid-point states, selected sets and normalized weights.
struct GridFit {
  Eigen::VectorXd sigma2_grid;
  std::vector<VariationalState> states;
  std::vector<std::vector<int>> selected_sets;  // {j : phi_j(l) > 1/2}
  Eigen::VectorXd log_weights;  // log config score; -inf for zero-mass sets
  Eigen::VectorXd weights;      // softmax of log_weights
  std::vector<CaviDiagnostics> diagnostics;
};

/// Final weighted-average parameters and summaries.
struct FitResult {
  Eigen::VectorXd mu;
  Eigen::VectorXd tau2;
  Eigen::VectorXd phi;
  Eigen::VectorXd beta_hat;      // phi_j * mu_j, standardized scale
  Eigen::VectorXd beta_hat_raw;  // back-transformed to the raw column scale
  double intercept_raw = 0.0;
  std::vector<int> S_hat;  // {j : phi_j > 1/2}
  GridFit grid;
  LassoFit lasso;
  PriorConfig prior;
};

/// Log of the unnormalized marginal configuration posterior under the
/// inverse-gamma sigma^2 prior:
///   log pi(S) + (|S|/2) log(gamma/(alpha+gamma))
///     - (a0 + alpha n / 2) log(b0 + (alpha/2) ||y - yhat_S||^2)
/// with log pi(S) = -log C(p,|S|) - |S| (log c + a log p). The fitted value
/// yhat_S comes from a Cholesky solve of the normal equations (jitter
/// 1e-10 n retried once on failure). Throws SizeOverCap when |S| > n.
double log_config_score(const Dataset& data, const std::vector<int>& S,
                        const PriorConfig& prior);

/// The full procedure: runs cavi_fixed_sigma at each of L equally spaced
/// grid points in [grid_lo_frac, grid_hi_frac] * sigma2_hat (initialized at
/// mu = beta_tilde, phi = 1/2), weights each run by the marginal score of its
/// selected set, and returns the weight-averaged parameters. A selected set
/// larger than n gets exactly zero weight (the size prior has no mass there).
FitResult fit_vb_empirical(const Dataset& data, const PriorConfig& prior,
                           const LassoFit& lasso,
                           std::optional<Eigen::VectorXd> sigma2_grid = std::nullopt);

}  // namespace vbsparse
