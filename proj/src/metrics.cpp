#include "vbsparse/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "vbsparse/errors.hpp"

namespace vbsparse {

MetricsReport compute_metrics(const std::string& scenario, const std::string& method,
                              const std::vector<ReplicationOutcome>& fits,
                              const std::vector<Eigen::VectorXd>& beta_stars) {
  if (fits.empty()) throw EmptyInput("compute_metrics needs at least one replication");
  if (fits.size() != beta_stars.size())
    throw DimensionMismatch("fits and beta_stars are not aligned");

  const int reps = static_cast<int>(fits.size());
  MetricsReport rep;
  rep.scenario = scenario;
  rep.method = method;
  rep.replications = reps;

  std::vector<double> l2(reps);
  for (int r = 0; r < reps; ++r) {
    const Eigen::VectorXd& beta_star = beta_stars[r];
    if (fits[r].beta_hat.size() != beta_star.size())
      throw DimensionMismatch("beta_hat and beta_star disagree at replication " +
                              std::to_string(r));
    l2[r] = (fits[r].beta_hat - beta_star).norm();
    rep.mean_model_size += static_cast<double>(fits[r].S_hat.size());

    std::vector<int> s_star;
    for (int j = 0; j < beta_star.size(); ++j)
      if (beta_star[j] != 0.0) s_star.push_back(j);

    bool superset = true;
    for (int j : s_star)
      if (!std::binary_search(fits[r].S_hat.begin(), fits[r].S_hat.end(), j)) {
        superset = false;
        break;
      }
    const bool exact = superset && fits[r].S_hat.size() == s_star.size();
    rep.p_superset += superset ? 1.0 : 0.0;
    rep.p_exact += exact ? 1.0 : 0.0;
    rep.runtime_sec_mean += fits[r].runtime_sec;
  }

  rep.mean_model_size /= reps;
  rep.p_superset /= reps;
  rep.p_exact /= reps;
  rep.runtime_sec_mean /= reps;

  double mean = 0.0;
  for (double v : l2) mean += v;
  mean /= reps;
  double ss = 0.0;
  for (double v : l2) ss += (v - mean) * (v - mean);
  rep.l2_mean = mean;
  rep.l2_se = reps > 1 ? std::sqrt(ss / (reps - 1)) : 0.0;

  assert(rep.p_exact <= rep.p_superset + 1e-15);
  return rep;
}

}  // namespace vbsparse
