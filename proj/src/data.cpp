#include "vbsparse/data.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <utility>

#include "vbsparse/errors.hpp"
#include "vbsparse/rng.hpp"

namespace vbsparse {

Dataset standardize(const Eigen::MatrixXd& X_raw, const Eigen::VectorXd& y_raw) {
  const int n = static_cast<int>(X_raw.rows());
  const int p = static_cast<int>(X_raw.cols());
  if (y_raw.size() != n)
    throw DimensionMismatch("response has length " + std::to_string(y_raw.size()) +
                            " but X has " + std::to_string(n) + " rows");
  if (n < 2) throw InvalidSpec("standardize requires n >= 2");

  Dataset ds;
  ds.n = n;
  ds.p = p;
  ds.X.resize(n, p);
  ds.col_means = X_raw.colwise().mean();
  ds.col_scales.resize(p);
  for (int j = 0; j < p; ++j) {
    Eigen::VectorXd centered = X_raw.col(j).array() - ds.col_means[j];
    const double ss = centered.squaredNorm();
    const double floor = n * 1e-16 * (1.0 + ds.col_means[j] * ds.col_means[j]);
    if (ss <= floor) throw ConstantColumn(j);
    const double scale = std::sqrt(ss / n);
    ds.col_scales[j] = scale;
    ds.X.col(j) = centered / scale;
  }
  ds.y_mean = y_raw.mean();
  ds.y = y_raw.array() - ds.y_mean;

  ds.xty = ds.X.transpose() * ds.y;
  ds.col_sqnorms.resize(p);
  for (int j = 0; j < p; ++j) ds.col_sqnorms[j] = ds.X.col(j).squaredNorm();
  return ds;
}

std::string to_string(DesignKind d) {
  return d == DesignKind::gaussian_ar1 ? "gaussian_ar1" : "orthogonal_means";
}

DesignKind design_from_string(const std::string& s) {
  if (s == "gaussian_ar1") return DesignKind::gaussian_ar1;
  if (s == "orthogonal_means") return DesignKind::orthogonal_means;
  throw InvalidSpec("unknown design \"" + s + "\"");
}

void validate(const ScenarioSpec& spec) {
  if (spec.n <= 0 || spec.p <= 0 || spec.s < 0)
    throw InvalidSpec("n, p must be positive and s nonnegative");
  if (spec.beta_star.size() != spec.p)
    throw InvalidSpec("beta_star has length " + std::to_string(spec.beta_star.size()) +
                      " but p = " + std::to_string(spec.p));
  int nnz = 0;
  for (int j = 0; j < spec.p; ++j)
    if (spec.beta_star[j] != 0.0) ++nnz;
  if (nnz != spec.s)
    throw InvalidSpec("s = " + std::to_string(spec.s) + " but beta_star has " +
                      std::to_string(nnz) + " nonzeros");
  if (spec.s > spec.p) throw InvalidSpec("s > p");
  if (!(spec.rho >= 0.0 && spec.rho < 1.0)) throw InvalidSpec("rho must be in [0,1)");
  if (!(spec.sigma_true > 0.0)) throw InvalidSpec("sigma_true must be positive");
  if (spec.replications <= 0) throw InvalidSpec("replications must be positive");
  if (spec.design == DesignKind::gaussian_ar1 && spec.s > spec.n)
    throw InvalidSpec("gaussian_ar1 scenarios require s <= n");
  if (spec.design == DesignKind::orthogonal_means && spec.n != spec.p)
    throw InvalidSpec("orthogonal_means scenarios require n == p");
}

ScenarioSampler::ScenarioSampler(ScenarioSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  if (spec_.design == DesignKind::gaussian_ar1 && spec_.rho > 0.0) {
    const int p = spec_.p;
    Eigen::MatrixXd psi(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) psi(i, j) = std::pow(spec_.rho, std::abs(i - j));
    Eigen::LLT<Eigen::MatrixXd> llt(psi);
    if (llt.info() != Eigen::Success)
      throw InvalidSpec("AR(1) covariance is not positive definite");
    chol_ = llt.matrixL();
  }
}

Eigen::VectorXd ScenarioSampler::generate_response_only(int replication_index) const {
  if (replication_index < 0) throw InvalidSpec("replication_index must be >= 0");
  if (spec_.design != DesignKind::orthogonal_means)
    throw InvalidSpec("generate_response_only is only for orthogonal_means designs");
  Rng rng = Rng::for_stream(spec_.seed, static_cast<std::uint64_t>(replication_index));
  Eigen::VectorXd y(spec_.n);
  for (int i = 0; i < spec_.n; ++i)
    y[i] = spec_.beta_star[i] + spec_.sigma_true * rng.next_normal();
  return y;
}

RawData ScenarioSampler::generate(int replication_index) const {
  if (replication_index < 0) throw InvalidSpec("replication_index must be >= 0");
  RawData out;
  if (spec_.design == DesignKind::orthogonal_means) {
    out.X = Eigen::MatrixXd::Identity(spec_.n, spec_.n);
    out.y = generate_response_only(replication_index);
    return out;
  }
  Rng rng = Rng::for_stream(spec_.seed, static_cast<std::uint64_t>(replication_index));
  const int n = spec_.n;
  const int p = spec_.p;
  out.X.resize(n, p);
  if (chol_.size() == 0) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) out.X(i, j) = rng.next_normal();
  } else {
    Eigen::VectorXd z(p);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) z[j] = rng.next_normal();
      // row_i = L z, so rows are iid N_p(0, Psi)
      out.X.row(i) = (chol_.triangularView<Eigen::Lower>() * z).transpose();
    }
  }
  out.y = out.X * spec_.beta_star;
  for (int i = 0; i < n; ++i) out.y[i] += spec_.sigma_true * rng.next_normal();
  return out;
}

RawData generate_scenario(const ScenarioSpec& spec, int replication_index) {
  return ScenarioSampler(spec).generate(replication_index);
}

namespace {

Eigen::VectorXd support_prefix(int p, const std::vector<double>& values) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (std::size_t i = 0; i < values.size(); ++i) beta[static_cast<int>(i)] = values[i];
  return beta;
}

std::vector<double> spaced(double lo, double hi, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i)
    v[i] = lo + (hi - lo) * (count == 1 ? 0.0 : static_cast<double>(i) / (count - 1));
  return v;
}

std::vector<double> repeated_blocks(const std::vector<double>& levels, int each) {
  std::vector<double> v;
  for (double level : levels)
    for (int i = 0; i < each; ++i) v.push_back(level);
  return v;
}

ScenarioSpec regression_spec(int n, int p, int s, std::vector<double> support, double rho,
                             std::uint64_t seed) {
  ScenarioSpec spec;
  spec.n = n;
  spec.p = p;
  spec.s = s;
  spec.beta_star = support_prefix(p, support);
  spec.rho = rho;
  spec.sigma_true = 1.0;
  spec.design = DesignKind::gaussian_ar1;
  spec.seed = seed;
  spec.replications = 100;
  return spec;
}

ScenarioSpec means_spec(int n, int s, double signal, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.n = n;
  spec.p = n;
  spec.s = s;
  spec.beta_star = support_prefix(n, std::vector<double>(s, signal));
  spec.rho = 0.0;
  spec.sigma_true = 1.0;
  spec.design = DesignKind::orthogonal_means;
  spec.seed = seed;
  spec.replications = 100;
  return spec;
}

}  // namespace

std::vector<NamedScenario> scenario_catalog() {
  std::vector<NamedScenario> cat;
  cat.push_back({"sim1-case1", regression_spec(100, 400, 10, spaced(0.5, 5.0, 10), 0.0, 101)});
  cat.push_back({"sim1-case2", regression_spec(200, 400, 10, spaced(0.5, 5.0, 10), 0.0, 102)});
  cat.push_back({"sim1-case3",
                 regression_spec(100, 400, 20, repeated_blocks({0.5, 1.0, 1.5, 2.0}, 5), 0.0, 103)});
  cat.push_back({"sim1-case4", regression_spec(200, 800, 20, spaced(0.5, 10.0, 20), 0.0, 104)});
  cat.push_back({"sim1-case5", regression_spec(200, 1600, 40, spaced(1.0, 10.0, 40), 0.0, 105)});
  cat.push_back({"sim2-signal10",
                 regression_spec(200, 1600, 40, std::vector<double>(40, 10.0), 0.0, 106)});
  cat.push_back({"sim2-signal1",
                 regression_spec(200, 1600, 40, std::vector<double>(40, 1.0), 0.0, 107)});
  cat.push_back({"sim2-signal0.6",
                 regression_spec(200, 1600, 40, std::vector<double>(40, 0.6), 0.0, 108)});
  cat.push_back({"sim3-rho0.2", regression_spec(100, 400, 10, spaced(0.6, 3.3, 10), 0.2, 109)});
  cat.push_back({"sim3-rho0.5", regression_spec(100, 400, 10, spaced(0.6, 3.3, 10), 0.5, 110)});
  cat.push_back({"sim3-rho0.8", regression_spec(100, 400, 10, spaced(0.6, 3.3, 10), 0.8, 111)});
  cat.push_back({"sim4-case1", means_spec(500, 50, 10.0, 112)});
  cat.push_back({"sim4-case2", means_spec(1000, 100, 10.0, 113)});
  cat.push_back({"sim4-case3", means_spec(2000, 200, 10.0, 114)});
  cat.push_back({"sim4-case4", means_spec(500, 50, 2.0, 115)});
  cat.push_back({"sim4-case5", means_spec(1000, 100, 2.0, 116)});
  cat.push_back({"sim4-case6", means_spec(2000, 200, 2.0, 117)});
  return cat;
}

}  // namespace vbsparse
