#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vbsparse/data.hpp"
#include "vbsparse/errors.hpp"
#include "vbsparse/io.hpp"
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

}  // namespace

TEST_CASE("two-point standardization") {
  Eigen::MatrixXd X(2, 1);
  X << 1.0, 3.0;
  Eigen::VectorXd y(2);
  y << 0.0, 2.0;
  const Dataset ds = standardize(X, y);
  CHECK(ds.X(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(ds.X(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ds.y[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(ds.y[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ds.col_means[0] == 2.0);
  CHECK(ds.col_scales[0] == 1.0);
  CHECK(ds.y_mean == 1.0);
}

TEST_CASE("already-standardized column is a fixed point") {
  Eigen::MatrixXd X(4, 1);
  X << -1.0, 1.0, -1.0, 1.0;  // sum 0, squared norm 4 = n
  Eigen::VectorXd y(4);
  y << 1.0, -1.0, 0.5, -0.5;
  const Dataset ds = standardize(X, y);
  for (int i = 0; i < 4; ++i) CHECK(ds.X(i, 0) == X(i, 0));
  CHECK(ds.col_scales[0] == 1.0);
}

TEST_CASE("column moments after standardization") {
  const Eigen::MatrixXd X = random_matrix(100, 400, 5);
  Eigen::VectorXd y = random_matrix(100, 1, 6);
  const Dataset ds = standardize(X, y);
  for (int j = 0; j < ds.p; ++j) {
    CHECK(std::fabs(ds.X.col(j).sum() / ds.n) < 1e-10);
    CHECK(ds.X.col(j).squaredNorm() == doctest::Approx(100.0).epsilon(1e-8));
  }
  CHECK(std::fabs(ds.y.sum()) < 1e-10 * ds.n);
}

TEST_CASE("standardize is idempotent") {
  const Eigen::MatrixXd X = random_matrix(50, 20, 7);
  Eigen::VectorXd y = random_matrix(50, 1, 8);
  const Dataset once = standardize(X, y);
  const Dataset twice = standardize(once.X, once.y);
  CHECK((twice.X - once.X).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((twice.y - once.y).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("error paths") {
  Eigen::MatrixXd X(3, 2);
  X << 1.0, 2.0, 1.0, 3.0, 1.0, 4.0;  // first column constant
  Eigen::VectorXd y(3);
  y << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS((void)standardize(X, y), ConstantColumn);
  try {
    (void)standardize(X, y);
  } catch (const ConstantColumn& e) {
    CHECK(e.column == 0);
  }
  Eigen::VectorXd y_short(2);
  y_short << 1.0, 2.0;
  CHECK_THROWS_AS((void)standardize(X, y_short), DimensionMismatch);
}

TEST_CASE("generation is deterministic") {
  const ScenarioSpec spec = scenario_catalog()[0].spec;  // sim1-case1
  const RawData a = generate_scenario(spec, 3);
  const RawData b = generate_scenario(spec, 3);
  CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
  const RawData c = generate_scenario(spec, 4);
  CHECK((a.X - c.X).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("independent design has small empirical correlations") {
  ScenarioSpec spec;
  spec.n = 1000;
  spec.p = 8;
  spec.s = 1;
  spec.beta_star = Eigen::VectorXd::Zero(8);
  spec.beta_star[0] = 1.0;
  spec.seed = 21;
  const RawData raw = generate_scenario(spec, 0);
  double acc = 0.0;
  int count = 0;
  for (int j = 0; j < 8; ++j)
    for (int k = j + 1; k < 8; ++k) {
      const Eigen::VectorXd a = raw.X.col(j).array() - raw.X.col(j).mean();
      const Eigen::VectorXd b = raw.X.col(k).array() - raw.X.col(k).mean();
      acc += std::fabs(a.dot(b) / (a.norm() * b.norm()));
      ++count;
    }
  CHECK(acc / count < 0.05);
}

TEST_CASE("AR(1) design reproduces the target correlation") {
  ScenarioSpec spec;
  spec.n = 4000;
  spec.p = 5;
  spec.s = 1;
  spec.beta_star = Eigen::VectorXd::Zero(5);
  spec.beta_star[0] = 1.0;
  spec.rho = 0.5;
  spec.seed = 22;
  const RawData raw = generate_scenario(spec, 0);
  for (int j = 0; j + 1 < 5; ++j) {
    const Eigen::VectorXd a = raw.X.col(j).array() - raw.X.col(j).mean();
    const Eigen::VectorXd b = raw.X.col(j + 1).array() - raw.X.col(j + 1).mean();
    CHECK(a.dot(b) / (a.norm() * b.norm()) == doctest::Approx(0.5).epsilon(0.08));
  }
  // lag-2 correlation rho^2
  const Eigen::VectorXd a = raw.X.col(0).array() - raw.X.col(0).mean();
  const Eigen::VectorXd b = raw.X.col(2).array() - raw.X.col(2).mean();
  CHECK(a.dot(b) / (a.norm() * b.norm()) == doctest::Approx(0.25).epsilon(0.25));
}

TEST_CASE("noise variance sanity across generated data") {
  const ScenarioSpec spec = scenario_catalog()[1].spec;  // sim1-case2, n=200
  for (int rep = 0; rep < 5; ++rep) {
    const RawData raw = generate_scenario(spec, rep);
    const Eigen::VectorXd resid = raw.y - raw.X * spec.beta_star;
    const double var = resid.squaredNorm() / spec.n;
    const double bound = 3.0 * spec.sigma_true * spec.sigma_true * std::sqrt(2.0 / spec.n);
    CHECK(std::fabs(var - spec.sigma_true * spec.sigma_true) < bound);
  }
}

TEST_CASE("orthogonal_means generation") {
  const ScenarioSpec spec = scenario_catalog()[11].spec;  // sim4-case1
  ScenarioSampler sampler(spec);
  const Eigen::VectorXd y = sampler.generate_response_only(0);
  CHECK(y.size() == 500);
  // signal coordinates center near 10
  double mean_signal = 0.0;
  for (int i = 0; i < 50; ++i) mean_signal += y[i];
  CHECK(mean_signal / 50 == doctest::Approx(10.0).epsilon(0.1));
  const RawData raw = sampler.generate(0);
  CHECK(raw.X.isApprox(Eigen::MatrixXd::Identity(500, 500)));
  CHECK((raw.y - y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("catalog matches the published scenario list") {
  const auto cat = scenario_catalog();
  REQUIRE(cat.size() == 17);

  auto find = [&](const std::string& name) -> const ScenarioSpec& {
    for (const auto& e : cat)
      if (e.name == name) return e.spec;
    REQUIRE(false);
    return cat[0].spec;
  };

  const ScenarioSpec& c1 = find("sim1-case1");
  CHECK(c1.n == 100);
  CHECK(c1.p == 400);
  CHECK(c1.s == 10);
  CHECK(c1.beta_star[0] == doctest::Approx(0.5));
  CHECK(c1.beta_star[9] == doctest::Approx(5.0));
  CHECK(c1.beta_star[1] == doctest::Approx(1.0));
  CHECK(c1.beta_star[10] == 0.0);

  const ScenarioSpec& s06 = find("sim2-signal0.6");
  CHECK(s06.n == 200);
  CHECK(s06.p == 1600);
  CHECK(s06.s == 40);
  for (int j = 0; j < 40; ++j) CHECK(s06.beta_star[j] == 0.6);

  const ScenarioSpec& r8 = find("sim3-rho0.8");
  CHECK(r8.rho == 0.8);
  CHECK(r8.beta_star[0] == doctest::Approx(0.6));
  CHECK(r8.beta_star[1] == doctest::Approx(0.9));
  CHECK(r8.beta_star[9] == doctest::Approx(3.3));

  const ScenarioSpec& m4 = find("sim4-case4");
  CHECK(m4.n == 500);
  CHECK(m4.s == 50);
  CHECK(m4.design == DesignKind::orthogonal_means);
  for (int j = 0; j < 50; ++j) CHECK(m4.beta_star[j] == 2.0);

  const ScenarioSpec& c4 = find("sim1-case4");
  CHECK(c4.p == 800);
  CHECK(c4.beta_star[19] == doctest::Approx(10.0));
}

TEST_CASE("catalog scenarios round-trip through JSON") {
  for (const auto& entry : scenario_catalog()) {
    const nlohmann::json j = scenario_to_json(entry.spec);
    const ScenarioSpec back = scenario_from_json(j);
    CHECK(back.n == entry.spec.n);
    CHECK(back.p == entry.spec.p);
    CHECK(back.s == entry.spec.s);
    CHECK(back.rho == entry.spec.rho);
    CHECK(back.sigma_true == entry.spec.sigma_true);
    CHECK(back.design == entry.spec.design);
    CHECK(back.seed == entry.spec.seed);
    CHECK(back.replications == entry.spec.replications);
    CHECK((back.beta_star - entry.spec.beta_star).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("spec validation") {
  ScenarioSpec spec = scenario_catalog()[0].spec;
  spec.s = 11;  // beta_star has 10 nonzeros
  CHECK_THROWS_AS(validate(spec), InvalidSpec);
  spec = scenario_catalog()[0].spec;
  spec.rho = 1.0;
  CHECK_THROWS_AS(validate(spec), InvalidSpec);
  spec = scenario_catalog()[0].spec;
  spec.beta_star = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(validate(spec), InvalidSpec);
}
