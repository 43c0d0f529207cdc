#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "vbsparse/data.hpp"

namespace vbsparse {

/// Coordinate-descent lasso fit on standardized data. Used to initialize the
/// variational engine, to pick the configuration that anchors g(S), and to
/// estimate the error variance for the sigma^2 grid.
struct LassoFit {
  Eigen::VectorXd beta_tilde;
  std::vector<int> active_set;  // ascending indices j with beta_tilde[j] != 0
  double lambda = 0.0;
  double sigma2_hat = 0.0;
  int n_iter = 0;
};

struct LassoOptions {
  int max_sweeps = 100000;
  double coord_tol = 1e-10;    // max |delta beta| defining a converged sweep
  double kkt_tol = 1e-6;
  int cv_folds = 5;
  int cv_grid_size = 50;
  double cv_lambda_min_ratio = 1e-3;
  std::uint64_t cv_shuffle_seed = 0x1a550u;  // fixed so fits are deterministic
  // AUTO walks back up the grid while |active| exceeds this fraction of n;
  // keeps the CV choice away from the interpolation end of the path
  double cv_saturation_frac = 0.8;
  std::vector<double>* objective_trace = nullptr;  // per-sweep objective, tests only
  std::vector<double>* cv_errors = nullptr;        // per-grid-point CV error, tests only
};

/// Minimizes (1/2n)||y - X b||^2 + lambda ||b||_1 to KKT tolerance 1e-6.
/// lambda = nullopt selects AUTO: 5-fold cross-validation over a 50-point
/// log grid from lambda_max = max_j |X^T y|_j / n down to lambda_max * 1e-3,
/// with CV ties broken toward the larger (sparser) lambda.
LassoFit lasso_fit(const Dataset& data, std::optional<double> lambda = std::nullopt,
                   const LassoOptions& opts = {});

/// Degrees-of-freedom-corrected residual variance ||y - X beta_tilde||^2 /
/// (n - |active_set|), clamped below at 1e-8. Throws DegenerateFit when the
/// active set has n or more members.
double estimate_sigma2(const Dataset& data, const LassoFit& fit);

/// max_j |X^T y|_j / n, the smallest penalty that zeroes every coordinate.
double lambda_max(const Dataset& data);

}  // namespace vbsparse
