#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vbsparse/data.hpp"
#include "vbsparse/errors.hpp"
#include "vbsparse/io.hpp"
#include "vbsparse/lasso.hpp"
#include "vbsparse/posterior.hpp"
#include "vbsparse/rng.hpp"

using namespace vbsparse;

namespace {

Eigen::MatrixXd random_matrix(int n, int p, std::uint64_t seed) {
  Rng rng = Rng::for_stream(seed, 0);
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = rng.next_normal();
  return X;
}

double pascal_choose(int n, int k) {
  // small-integer binomial by the additive recurrence, no lgamma
  std::vector<double> row(k + 1, 0.0);
  row[0] = 1.0;
  for (int i = 1; i <= n; ++i)
    for (int j = std::min(i, k); j >= 1; --j) row[j] += row[j - 1];
  return row[k];
}

/// Least squares residual sum of squares by explicit normal equations and
/// Gaussian elimination with partial pivoting (no Eigen decompositions).
double gauss_rss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const std::vector<int>& S) {
  const int s = static_cast<int>(S.size());
  if (s == 0) return y.squaredNorm();
  std::vector<std::vector<double>> A(s, std::vector<double>(s + 1, 0.0));
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b < s; ++b) A[a][b] = X.col(S[a]).dot(X.col(S[b]));
    A[a][s] = X.col(S[a]).dot(y);
  }
  for (int col = 0; col < s; ++col) {
    int pivot = col;
    for (int r = col + 1; r < s; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[pivot][col])) pivot = r;
    std::swap(A[col], A[pivot]);
    for (int r = 0; r < s; ++r) {
      if (r == col) continue;
      const double f = A[r][col] / A[col][col];
      for (int cc = col; cc <= s; ++cc) A[r][cc] -= f * A[col][cc];
    }
  }
  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(y.size());
  for (int a = 0; a < s; ++a) fitted += (A[a][s] / A[a][a]) * X.col(S[a]);
  return (y - fitted).squaredNorm();
}

double oracle_score(const Dataset& data, const std::vector<int>& S,
                    const PriorConfig& prior) {
  const int s = static_cast<int>(S.size());
  const double rss = gauss_rss(data.X, data.y, S);
  return -std::log(pascal_choose(data.p, s)) -
         s * (std::log(prior.c) + prior.a * std::log(static_cast<double>(data.p))) +
         0.5 * s * std::log(prior.gamma / (prior.alpha + prior.gamma)) -
         (prior.a0 + prior.alpha * data.n / 2.0) *
             std::log(prior.b0 + prior.alpha / 2.0 * rss);
}

Dataset small_dataset(int n, int p, std::uint64_t seed) {
  const Eigen::MatrixXd X = random_matrix(n, p, seed);
  Eigen::VectorXd y = random_matrix(n, 1, seed + 1);
  return standardize(X, y);
}

}  // namespace

TEST_CASE("empty configuration closed form") {
  const Dataset data = small_dataset(12, 4, 301);
  PriorConfig prior;
  const double expected = -(prior.a0 + prior.alpha * data.n / 2.0) *
                          std::log(prior.b0 + prior.alpha / 2.0 * data.y.squaredNorm());
  CHECK(log_config_score(data, {}, prior) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("all subsets of a 5x3 problem match the brute-force oracle") {
  const Dataset data = small_dataset(5, 3, 302);
  PriorConfig defaulted;
  PriorConfig scaled_b0;
  scaled_b0.b0 = 3.0;  // the b0 = p convention at this problem size
  for (const PriorConfig& prior : {defaulted, scaled_b0}) {
    for (int mask = 0; mask < 8; ++mask) {
      std::vector<int> S;
      for (int j = 0; j < 3; ++j)
        if (mask & (1 << j)) S.push_back(j);
      CHECK(std::fabs(log_config_score(data, S, prior) - oracle_score(data, S, prior)) <=
            1e-10);
    }
  }
}

TEST_CASE("score is invariant to index order") {
  const Dataset data = small_dataset(20, 6, 303);
  PriorConfig prior;
  CHECK(log_config_score(data, {1, 3, 5}, prior) ==
        doctest::Approx(log_config_score(data, {5, 1, 3}, prior)).epsilon(1e-14));
}

TEST_CASE("adding an orthogonal irrelevant column costs exactly the penalty") {
  // build orthogonal columns; y lies in span(x0) so rss is unchanged by x1
  const int n = 24;
  Eigen::MatrixXd O = random_matrix(n, 2, 304);
  for (int j = 0; j < 2; ++j) {
    O.col(j).array() -= O.col(j).mean();
    for (int k = 0; k < j; ++k) O.col(j) -= O.col(k).dot(O.col(j)) * O.col(k);
    O.col(j).array() -= O.col(j).mean();
    O.col(j) /= O.col(j).norm();
  }
  Eigen::MatrixXd X = O * std::sqrt(static_cast<double>(n));
  Eigen::VectorXd y = 2.0 * X.col(0);
  const Dataset data = standardize(X, y);
  PriorConfig prior;
  const double diff =
      log_config_score(data, {0, 1}, prior) - log_config_score(data, {0}, prior);
  const double expected = -std::log(pascal_choose(2, 2) / pascal_choose(2, 1)) -
                          (std::log(prior.c) + prior.a * std::log(2.0)) +
                          0.5 * std::log(prior.gamma / (prior.alpha + prior.gamma));
  CHECK(diff == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("oversized configurations are rejected") {
  const Dataset data = small_dataset(4, 6, 305);
  std::vector<int> S = {0, 1, 2, 3, 4};
  CHECK_THROWS_AS((void)log_config_score(data, S, PriorConfig{}), SizeOverCap);
}

namespace {

struct FitProblem {
  Dataset data;
  LassoFit lasso;
};

FitProblem fit_problem(std::uint64_t seed, int n = 60, int p = 30) {
  const Eigen::MatrixXd X = random_matrix(n, p, seed);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  beta[0] = 2.0;
  beta[1] = -1.5;
  beta[2] = 1.0;
  Rng rng = Rng::for_stream(seed + 7, 0);
  Eigen::VectorXd y = X * beta;
  for (int i = 0; i < n; ++i) y[i] += rng.next_normal();
  FitProblem prob;
  prob.data = standardize(X, y);
  prob.lasso = lasso_fit(prob.data);
  return prob;
}

}  // namespace

TEST_CASE("a singleton grid reproduces the fixed-sigma run exactly") {
  FitProblem prob = fit_problem(310);
  PriorConfig prior;
  Eigen::VectorXd grid(1);
  grid[0] = prob.lasso.sigma2_hat;
  const FitResult fit = fit_vb_empirical(prob.data, prior, prob.lasso, grid);
  CHECK(fit.grid.weights[0] == 1.0);

  const GScalar g = geometric_mean_eigs(prob.data, prob.lasso.active_set);
  const CaviResult run = cavi_fixed_sigma(
      prob.data, prior, grid[0], g, prob.lasso.beta_tilde,
      init_state(prob.data, prior, grid[0], prob.lasso.beta_tilde));
  CHECK((fit.mu - run.state.mu).cwiseAbs().maxCoeff() == 0.0);
  CHECK((fit.phi - run.state.phi).cwiseAbs().maxCoeff() == 0.0);
  CHECK((fit.tau2 - run.state.tau2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("duplicated grid points share the weight equally") {
  FitProblem prob = fit_problem(311);
  PriorConfig prior;
  Eigen::VectorXd grid(2);
  grid[0] = grid[1] = prob.lasso.sigma2_hat;
  const FitResult fit = fit_vb_empirical(prob.data, prior, prob.lasso, grid);
  CHECK(fit.grid.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.grid.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK((fit.mu - fit.grid.states[0].mu).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("weights are a normalized softmax") {
  FitProblem prob = fit_problem(312);
  const FitResult fit = fit_vb_empirical(prob.data, PriorConfig{}, prob.lasso);
  CHECK(fit.grid.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (int l = 0; l < fit.grid.weights.size(); ++l) CHECK(fit.grid.weights[l] >= 0.0);
  CHECK(fit.grid.weights.size() == 10);
  // softmax consistency against the stored log weights
  double best = -1e300;
  for (int l = 0; l < 10; ++l) best = std::max(best, fit.grid.log_weights[l]);
  double total = 0.0;
  for (int l = 0; l < 10; ++l) total += std::exp(fit.grid.log_weights[l] - best);
  for (int l = 0; l < 10; ++l)
    CHECK(fit.grid.weights[l] ==
          doctest::Approx(std::exp(fit.grid.log_weights[l] - best) / total).epsilon(1e-12));
}

TEST_CASE("fit is deterministic") {
  FitProblem prob = fit_problem(313);
  const FitResult a = fit_vb_empirical(prob.data, PriorConfig{}, prob.lasso);
  const FitResult b = fit_vb_empirical(prob.data, PriorConfig{}, prob.lasso);
  CHECK((a.phi - b.phi).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.mu - b.mu).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.S_hat == b.S_hat);
}

TEST_CASE("estimates and selection follow the averaged parameters") {
  FitProblem prob = fit_problem(314);
  const FitResult fit = fit_vb_empirical(prob.data, PriorConfig{}, prob.lasso);
  for (int j = 0; j < prob.data.p; ++j)
    CHECK(fit.beta_hat[j] == fit.phi[j] * fit.mu[j]);
  std::vector<int> expected;
  for (int j = 0; j < prob.data.p; ++j)
    if (fit.phi[j] > 0.5) expected.push_back(j);
  CHECK(fit.S_hat == expected);
  CHECK(fit.S_hat == std::vector<int>({0, 1, 2}));
}

TEST_CASE("raw-scale back-transform matches a pre-standardized refit") {
  const int n = 50, p = 12;
  Eigen::MatrixXd X = random_matrix(n, p, 315);
  // give the columns visible scales and offsets
  for (int j = 0; j < p; ++j) X.col(j) = X.col(j) * (1.0 + 0.3 * j) + Eigen::VectorXd::Constant(n, 2.0 * j);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  beta[0] = 1.0;
  beta[3] = -0.8;
  Rng rng = Rng::for_stream(316, 0);
  Eigen::VectorXd y = X * beta;
  for (int i = 0; i < n; ++i) y[i] += rng.next_normal();

  const Dataset raw_ds = standardize(X, y);
  const LassoFit lasso_raw = lasso_fit(raw_ds);
  const FitResult fit_raw = fit_vb_empirical(raw_ds, PriorConfig{}, lasso_raw);

  // refit on the already-standardized copy: its "raw" scale is the
  // standardized one, so its beta_hat_raw equals the first fit's beta_hat
  const Dataset std_ds = standardize(raw_ds.X, raw_ds.y);
  const LassoFit lasso_std = lasso_fit(std_ds);
  const FitResult fit_std = fit_vb_empirical(std_ds, PriorConfig{}, lasso_std);

  CHECK((fit_std.beta_hat_raw - fit_raw.beta_hat).cwiseAbs().maxCoeff() < 1e-10);
  for (int j = 0; j < p; ++j)
    CHECK(fit_raw.beta_hat_raw[j] ==
          doctest::Approx(fit_raw.beta_hat[j] / raw_ds.col_scales[j]).epsilon(1e-14));
  // fitted values reproduce on the raw scale
  const Eigen::VectorXd pred_raw =
      X * fit_raw.beta_hat_raw + Eigen::VectorXd::Constant(n, fit_raw.intercept_raw);
  const Eigen::VectorXd pred_std = raw_ds.X * fit_raw.beta_hat;
  CHECK((pred_raw.array() - raw_ds.y_mean - pred_std.array()).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("summarize emits a faithful record") {
  FitProblem prob = fit_problem(317);
  const FitResult fit = fit_vb_empirical(prob.data, PriorConfig{}, prob.lasso);
  const nlohmann::json j = summarize(fit);
  CHECK(j["S_hat"].get<std::vector<int>>() == fit.S_hat);
  CHECK(j["phi"].size() == static_cast<std::size_t>(prob.data.p));
  CHECK(j["weights"].size() == 10);

  // JSON round-trip preserves finite doubles bit-exactly
  const nlohmann::json back = nlohmann::json::parse(j.dump());
  const auto phi = back["phi"].get<std::vector<double>>();
  for (int k = 0; k < prob.data.p; ++k) CHECK(phi[k] == fit.phi[k]);
  const auto bh = back["beta_hat"].get<std::vector<double>>();
  for (int k = 0; k < prob.data.p; ++k) CHECK(bh[k] == fit.beta_hat_raw[k]);
}

TEST_CASE("a fit with every phi below half selects nothing") {
  // pure-noise response with a heavy size penalty drives phi to zero
  const Dataset data = small_dataset(40, 10, 318);
  LassoFit lasso;
  lasso.beta_tilde = Eigen::VectorXd::Zero(10);
  lasso.sigma2_hat = data.y.squaredNorm() / data.n;
  PriorConfig prior;
  prior.c = 1e6;  // huge per-coordinate cost
  const FitResult fit = fit_vb_empirical(data, prior, lasso);
  CHECK(fit.S_hat.empty());
  CHECK(fit.beta_hat.cwiseAbs().maxCoeff() <
        1e-3);  // phi ~ 0 makes the estimate vanish
}
