#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace vbsparse {

/// Aggregated evaluation of one method on one scenario.
struct MetricsReport {
  std::string scenario;
  std::string method;  // "vb_empirical" or "lasso"
  int replications = 0;
  double l2_mean = 0.0;  // E ||beta_hat - beta_star||_2 on the raw scale
  double l2_se = 0.0;    // sample SD across replications
  double mean_model_size = 0.0;
  double p_superset = 0.0;  // P(S_hat contains S_star)
  double p_exact = 0.0;     // P(S_hat == S_star)
  double runtime_sec_mean = 0.0;
};

/// One replication's fitted summary, on the raw coefficient scale.
struct ReplicationOutcome {
  Eigen::VectorXd beta_hat;
  std::vector<int> S_hat;  // ascending
  double runtime_sec = 0.0;
};

MetricsReport compute_metrics(const std::string& scenario, const std::string& method,
                              const std::vector<ReplicationOutcome>& fits,
                              const std::vector<Eigen::VectorXd>& beta_stars);

}  // namespace vbsparse
