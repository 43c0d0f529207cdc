#include "vbsparse/vb.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <utility>

#include "vbsparse/errors.hpp"

namespace vbsparse {

namespace {
constexpr double kLogitClamp = 35.0;
constexpr double kPhiFloor = 1e-12;
constexpr int kCacheRefreshEvery = 32;

double clamp_phi(double logit) {
  const double l = std::clamp(logit, -kLogitClamp, kLogitClamp);
  const double phi = 1.0 / (1.0 + std::exp(-l));
  return std::clamp(phi, kPhiFloor, 1.0 - kPhiFloor);
}
}  // namespace

VariationalState init_state(const Dataset& data, const PriorConfig& prior, double sigma2,
                            const Eigen::VectorXd& beta_tilde) {
  VariationalState st;
  st.mu = beta_tilde;
  st.tau2 = Eigen::VectorXd::Constant(data.p, sigma2 / (data.n * (prior.alpha + prior.gamma)));
  st.phi = Eigen::VectorXd::Constant(data.p, 0.5);
  st.r_cache = data.X * (st.phi.cwiseProduct(st.mu));
  return st;
}

GScalar geometric_mean_eigs(const Dataset& data, const std::vector<int>& S) {
  if (S.empty()) return {static_cast<double>(data.n)};
  const int s = static_cast<int>(S.size());
  if (s > data.n) throw InvalidSpec("geometric_mean_eigs requires |S| <= n");

  Eigen::MatrixXd sub(data.n, s);
  for (int k = 0; k < s; ++k) sub.col(k) = data.X.col(S[k]);
  const Eigen::MatrixXd gram = sub.transpose() * sub;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  if (ev.minCoeff() <= 1e-10 * data.n)
    throw SingularSubmatrix("Gram submatrix of size " + std::to_string(s) +
                            " is numerically singular");
  return {std::exp(ev.array().log().mean())};
}

double entropy_bits(double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw DomainError("entropy requires phi in [0,1]");
  double h = 0.0;
  if (phi > 0.0) h -= phi * std::log2(phi);
  if (phi < 1.0) h -= (1.0 - phi) * std::log2(1.0 - phi);
  return h;
}

std::vector<int> prioritized_order(const Eigen::VectorXd& mu) {
  std::vector<int> order(mu.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::fabs(mu[a]) > std::fabs(mu[b]);
  });
  return order;
}

VariationalState cavi_sweep(VariationalState state, const Dataset& data,
                            const PriorConfig& prior, double sigma2, GScalar g,
                            const Eigen::VectorXd& beta_tilde,
                            const std::vector<int>& order) {
  const int n = data.n;
  const double gg = prior.gamma * g.g_tilde;
  const double mu_denom = n + gg / prior.alpha;
  const double anchor = gg / prior.alpha;
  const double tau2 = sigma2 / (n * (prior.alpha + prior.gamma));
  const double logit_const = 0.5 * std::log(gg / (n * (prior.alpha + prior.gamma))) -
                             std::log(prior.c) - prior.a * std::log(static_cast<double>(data.p));
  const double quad_coef = (n * prior.alpha / 2.0 + gg) / sigma2;
  const double pull_coef = gg / (2.0 * sigma2);

  for (int j : order) {
    const double phimu_old = state.phi[j] * state.mu[j];
    const double cross =
        data.X.col(j).dot(state.r_cache) - data.col_sqnorms[j] * phimu_old;
    const double mu = (data.xty[j] - cross + anchor * beta_tilde[j]) / mu_denom;
    const double diff = mu - beta_tilde[j];
    const double logit = logit_const + quad_coef * mu * mu - pull_coef * diff * diff;
    if (std::isnan(logit))
      throw NumericalOverflow("NaN logit at coordinate " + std::to_string(j));
    const double phi = clamp_phi(logit);

    state.mu[j] = mu;
    state.tau2[j] = tau2;
    state.phi[j] = phi;
    const double delta = phi * mu - phimu_old;
    if (delta != 0.0) state.r_cache += delta * data.X.col(j);
  }
  ++state.sweep_count;
  return state;
}

CaviResult cavi_fixed_sigma(const Dataset& data, const PriorConfig& prior, double sigma2,
                            GScalar g, const Eigen::VectorXd& beta_tilde,
                            VariationalState init, int max_sweeps) {
  if (!(sigma2 > 0.0)) throw InvalidSpec("cavi_fixed_sigma requires sigma2 > 0");
  const std::vector<int> order = prioritized_order(init.mu);

  CaviResult res;
  res.state = std::move(init);
  Eigen::VectorXd h_prev(data.p);
  for (int j = 0; j < data.p; ++j) h_prev[j] = entropy_bits(res.state.phi[j]);

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    res.state = cavi_sweep(std::move(res.state), data, prior, sigma2, g, beta_tilde, order);
    if (sweep % kCacheRefreshEvery == 0)
      res.state.r_cache = data.X * res.state.phi.cwiseProduct(res.state.mu);

    double max_dh = 0.0;
    for (int j = 0; j < data.p; ++j) {
      const double h = entropy_bits(res.state.phi[j]);
      max_dh = std::max(max_dh, std::fabs(h - h_prev[j]));
      h_prev[j] = h;
    }
    res.diagnostics.sweeps.push_back(
        {sweep, max_dh, surrogate_elbo(res.state, data, prior, sigma2, g, beta_tilde)});
    if (max_dh < prior.delta) {
      res.diagnostics.converged = true;
      break;
    }
  }
  // settle the cache exactly before handing the state out
  res.state.r_cache = data.X * res.state.phi.cwiseProduct(res.state.mu);
  if (!res.diagnostics.converged)
    std::fprintf(stderr, "vbsparse: warning: sweep cap %d reached at sigma2=%g\n",
                 max_sweeps, sigma2);
  return res;
}

double surrogate_elbo(const VariationalState& state, const Dataset& data,
                      const PriorConfig& prior, double sigma2, GScalar g,
                      const Eigen::VectorXd& beta_tilde) {
  const int n = data.n;
  const int p = data.p;
  const double gg = prior.gamma * g.g_tilde;

  const Eigen::VectorXd phimu = state.phi.cwiseProduct(state.mu);
  const Eigen::VectorXd r = data.X * phimu;

  double e_d = r.squaredNorm() - 2.0 * data.y.dot(r);
  double e_b = 0.0;
  double rest = 0.0;
  const double per_phi = 0.5 + 0.5 * std::log(gg) - 0.5 * std::log(sigma2) -
                         std::log(prior.c) - prior.a * std::log(static_cast<double>(p));
  for (int j = 0; j < p; ++j) {
    const double phi = state.phi[j];
    const double mu = state.mu[j];
    const double tau2 = state.tau2[j];
    e_d += n * phi * (tau2 + mu * mu) - data.col_sqnorms[j] * phimu[j] * phimu[j];
    const double diff = mu - beta_tilde[j];
    e_b += n * tau2 * phi + g.g_tilde * phi * diff * diff;
    double entropy_nats = 0.0;
    if (phi > 0.0 && phi < 1.0)
      entropy_nats = -phi * std::log(phi) - (1.0 - phi) * std::log(1.0 - phi);
    rest += entropy_nats + phi * (0.5 * std::log(tau2) + per_phi);
  }
  return -prior.alpha / (2.0 * sigma2) * e_d - prior.gamma / (2.0 * sigma2) * e_b + rest;
}

}  // namespace vbsparse
