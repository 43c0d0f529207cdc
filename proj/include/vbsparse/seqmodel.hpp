#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vbsparse/data.hpp"
#include "vbsparse/vb.hpp"

namespace vbsparse {

/// Closed-form variational fit for the normal means model y_i ~ N(beta_i,
/// sigma^2) with the empirical spike-and-slab prior. No iteration is needed:
///   mu_i = y_i,  tau^2 = sigma^2 / (alpha + gamma),
///   logit phi_i = logit(lambda_n) + 1/2 log(gamma/(alpha+gamma))
///                 + alpha y_i^2 / (2 sigma^2).
struct MeansFit {
  Eigen::VectorXd mu;
  double tau2 = 0.0;
  Eigen::VectorXd phi;
  double lambda_n = 0.0;
  double sigma2 = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;
};

/// Prior inclusion probability n^{-(a+1)}.
double lambda_n(int n, double a);

MeansFit fit_means(const Eigen::VectorXd& y, double sigma2, const PriorConfig& prior);

/// Exact marginal inclusion probabilities by enumerating all 2^n
/// configurations under the independent Bernoulli(lambda_n) spike-and-slab
/// prior with empirical N(y_i, sigma^2/gamma) slabs and the alpha-power
/// likelihood. Oracle for fit_means; guards with TooLarge when n > 12.
Eigen::VectorXd exact_posterior_inclusion(const Eigen::VectorXd& y, double sigma2,
                                          const PriorConfig& prior);

/// Linear functional omega = w^T beta with credible tail level zeta.
struct FunctionalQuery {
  Eigen::VectorXd w;
  double zeta = 0.025;
};

/// Generalized-inverse quantile (smallest x with CDF >= prob) of the marginal
/// posterior of w^T beta under the variational approximation: a mixture over
/// support patterns T of N(w_T^T y_T, sigma^2 v_alpha ||w_T||^2) with
/// v_alpha = (alpha + gamma)^{-1}, plus an atom at 0 from the empty pattern.
/// Basis vectors are handled directly, sparse w (<= 20 nonzeros) by pattern
/// enumeration, dense w by 200,000 fixed-seed Monte Carlo draws.
double mixture_quantile(const MeansFit& fit, const Eigen::VectorXd& w, double prob);

/// Upper (1 - zeta)-quantile of the mixture above. Throws InvalidLevel for
/// zeta outside (0, 1/2).
double credible_upper_bound(const MeansFit& fit, const FunctionalQuery& query);

struct CoverageReport {
  Eigen::VectorXd beta_star;
  Eigen::VectorXd coverage;     // per-coordinate coverage of beta_star_i
  Eigen::VectorXd mean_length;  // per coordinate, over reps where phi_i > 1/2
  Eigen::VectorXd mean_phi;
  double mean_selected_length = 0.0;  // headline: mean over selected (i, rep)
  double l2_mean = 0.0;
  double l2_se = 0.0;
  int replications = 0;
};

/// Equal-tailed (1 - 2 zeta) intervals per coordinate across replications of
/// an orthogonal_means scenario; sigma^2 is treated as known (sigma_true^2).
CoverageReport coverage_experiment(const ScenarioSpec& spec, const PriorConfig& prior,
                                   double zeta);

}  // namespace vbsparse
