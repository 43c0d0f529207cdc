#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace vbsparse {

/// Standardized regression data. Columns of X sum to 0 and have squared norm
/// n; y sums to 0. Instances are produced by standardize() and treated as
/// immutable afterwards, so they are safe to share across threads.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  int n = 0;
  int p = 0;
  Eigen::VectorXd col_means;   // centering applied to each raw column
  Eigen::VectorXd col_scales;  // per-column scale sqrt(sum (x-mean)^2 / n), > 0
  double y_mean = 0.0;

  // cached cross-products (exact values on the standardized matrix)
  Eigen::VectorXd xty;          // X^T y
  Eigen::VectorXd col_sqnorms;  // ||x_j||^2, equal to n up to rounding
};

/// Center and rescale so that each column of X has zero sum and squared norm
/// n, and y has zero sum (y is centered, not rescaled). Throws
/// ConstantColumn(j) for zero-variance columns and DimensionMismatch when the
/// response length disagrees with X.
Dataset standardize(const Eigen::MatrixXd& X_raw, const Eigen::VectorXd& y_raw);

enum class DesignKind { gaussian_ar1, orthogonal_means };

std::string to_string(DesignKind d);
DesignKind design_from_string(const std::string& s);

/// Definition of one synthetic-data scenario.
struct ScenarioSpec {
  int n = 0;
  int p = 0;
  int s = 0;
  Eigen::VectorXd beta_star;
  double rho = 0.0;
  double sigma_true = 1.0;
  DesignKind design = DesignKind::gaussian_ar1;
  std::uint64_t seed = 0;
  int replications = 100;
};

/// Throws InvalidSpec if dimensions or fields are inconsistent.
void validate(const ScenarioSpec& spec);

struct RawData {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

/// Draws replications of a scenario. The AR(1) Cholesky factor of the column
/// covariance is computed once at construction and reused; instances are
/// immutable and safe to share across threads.
class ScenarioSampler {
 public:
  explicit ScenarioSampler(ScenarioSpec spec);

  /// Deterministic in (spec.seed, replication_index). Rows of X are iid
  /// N_p(0, Psi) with Psi_ij = rho^|i-j|; y = X beta_star + sigma_true * eps.
  /// For orthogonal_means designs, X = I_n and y_i = beta_star_i + sigma eps_i.
  RawData generate(int replication_index) const;

  /// Response only (avoids materializing X = I for means-model scenarios).
  Eigen::VectorXd generate_response_only(int replication_index) const;

  const ScenarioSpec& spec() const { return spec_; }

 private:
  ScenarioSpec spec_;
  Eigen::MatrixXd chol_;  // lower Cholesky factor of Psi; empty when rho == 0
};

/// One-shot convenience wrapper over ScenarioSampler.
RawData generate_scenario(const ScenarioSpec& spec, int replication_index);

struct NamedScenario {
  std::string name;
  ScenarioSpec spec;
};

/// The 17 built-in scenarios, keyed "sim1-case1" ... "sim4-case6".
std::vector<NamedScenario> scenario_catalog();

}  // namespace vbsparse
