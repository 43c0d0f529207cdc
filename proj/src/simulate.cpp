#include "vbsparse/simulate.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "vbsparse/errors.hpp"
#include "vbsparse/lasso.hpp"
#include "vbsparse/posterior.hpp"

namespace vbsparse {

namespace {

struct RepResult {
  ReplicationOutcome vb;
  ReplicationOutcome lasso;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Runs fn(rep) for rep in [0, reps) on `threads` workers; results land in a
/// preallocated slot per replication so aggregation order never depends on
/// scheduling.
template <typename Fn>
void parallel_reps(int reps, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, reps));
  if (threads == 1) {
    for (int r = 0; r < reps; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= reps) return;
      try {
        fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

int resolve_threads(std::optional<int> flag_value) {
  if (flag_value && *flag_value > 0) return *flag_value;
  if (const char* env = std::getenv("VBSPARSE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

SimulateOutput run_simulation(const std::string& scenario_name, const ScenarioSpec& spec_in,
                              const SimulateOptions& opts) {
  ScenarioSpec spec = spec_in;
  if (opts.reps) spec.replications = *opts.reps;
  if (opts.seed) spec.seed = *opts.seed;
  validate(spec);

  SimulateOutput out;
  const int reps = spec.replications;
  std::vector<Eigen::VectorXd> beta_stars(reps, spec.beta_star);

  if (spec.design == DesignKind::orthogonal_means) {
    ScenarioSampler sampler(spec);
    std::vector<ReplicationOutcome> vb(reps);
    const double sigma2 = spec.sigma_true * spec.sigma_true;
    parallel_reps(reps, opts.threads, [&](int r) {
      const auto t0 = std::chrono::steady_clock::now();
      const Eigen::VectorXd y = sampler.generate_response_only(r);
      const MeansFit fit = fit_means(y, sigma2, opts.prior);
      vb[r].beta_hat = fit.phi.cwiseProduct(fit.mu);
      for (int i = 0; i < spec.n; ++i)
        if (fit.phi[i] > 0.5) vb[r].S_hat.push_back(i);
      vb[r].runtime_sec = seconds_since(t0);
    });
    out.rows.push_back(compute_metrics(scenario_name, "vb_empirical", vb, beta_stars));
    out.coverage = coverage_experiment(spec, opts.prior, opts.zeta);
    return out;
  }

  ScenarioSampler sampler(spec);
  std::vector<RepResult> results(reps);
  parallel_reps(reps, opts.threads, [&](int r) {
    const RawData raw = sampler.generate(r);
    const Dataset data = standardize(raw.X, raw.y);

    const auto t_lasso = std::chrono::steady_clock::now();
    const LassoFit lasso = lasso_fit(data);
    results[r].lasso.runtime_sec = seconds_since(t_lasso);
    results[r].lasso.beta_hat = lasso.beta_tilde.cwiseQuotient(data.col_scales);
    results[r].lasso.S_hat = lasso.active_set;

    const auto t_vb = std::chrono::steady_clock::now();
    const FitResult fit = fit_vb_empirical(data, opts.prior, lasso);
    results[r].vb.runtime_sec = results[r].lasso.runtime_sec + seconds_since(t_vb);
    results[r].vb.beta_hat = fit.beta_hat_raw;
    results[r].vb.S_hat = fit.S_hat;
  });

  std::vector<ReplicationOutcome> vb(reps), lasso(reps);
  for (int r = 0; r < reps; ++r) {
    vb[r] = std::move(results[r].vb);
    lasso[r] = std::move(results[r].lasso);
  }
  out.rows.push_back(compute_metrics(scenario_name, "vb_empirical", vb, beta_stars));
  out.rows.push_back(compute_metrics(scenario_name, "lasso", lasso, beta_stars));
  return out;
}

}  // namespace vbsparse
