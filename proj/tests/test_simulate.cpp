#include "doctest.h"

#include <cmath>
#include <limits>

#include "nestedma/simulate.hpp"
#include "testutil.hpp"

using namespace nestedma;

TEST_CASE("p_rule matches the reference sizes and the rank cap") {
  CHECK(p_rule(100) == 86);
  CHECK(p_rule(250) == 158);
  CHECK(p_rule(500) == 251);
  CHECK(p_rule(1000) == 400);
  CHECK(p_rule(1500) == 524);
  // Below n = 64 the raw rule exceeds n; the cap keeps the design tall.
  CHECK(p_rule(50) == 50);
  CHECK(p_rule(63) == 63);
  CHECK(p_rule(64) == 64);
}

TEST_CASE("generate_design: intercept, determinism, near-identity covariance") {
  RngStream s1(11, 200, 0, kPurposeDesign);
  const DesignMatrix x = generate_design(12, 5, s1);
  for (int i = 0; i < 12; ++i) CHECK(x.values(i, 0) == 1.0);

  RngStream s2(11, 200, 0, kPurposeDesign);
  const DesignMatrix again = generate_design(12, 5, s2);
  CHECK((x.values - again.values).cwiseAbs().maxCoeff() == 0.0);

  RngStream s3(11, 200, 1, kPurposeDesign);
  const int n = 10000;
  const DesignMatrix big = generate_design(n, 5, s3);
  const Eigen::MatrixXd cols = big.values.rightCols(4);
  const Eigen::MatrixXd cov = cols.transpose() * cols / static_cast<double>(n);
  CHECK((cov - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.05);

  RngStream s4(11, 200, 2, kPurposeDesign);
  CHECK_THROWS_AS(generate_design(3, 4, s4), InvalidParamsError);
}

TEST_CASE("beta_for_case formulas") {
  CaseSpec c1{1, 1.0, 1.0};
  const Eigen::VectorXd b1 = beta_for_case(c1, 3);
  CHECK(b1[0] == doctest::Approx(1.0));
  CHECK(b1[1] == doctest::Approx(0.5));
  CHECK(b1[2] == doctest::Approx(1.0 / 3.0));

  CaseSpec c3{3, 1.0, 1.0};
  const Eigen::VectorXd b3 = beta_for_case(c3, 3);
  CHECK(b3[0] == doctest::Approx(1.0 / 3.0));
  CHECK(b3[1] == doctest::Approx(0.5));
  CHECK(b3[2] == doctest::Approx(1.0));

  CaseSpec c2{2, 1.0, 1.0};
  CHECK(beta_for_case(c2, 3)[0] == doctest::Approx(std::exp(-1.0)));

  CaseSpec c4{4, 0.5, 1.0};
  CHECK(beta_for_case(c4, 2)[1] == doctest::Approx(std::exp(-1.0)));

  CaseSpec bad{5, 1.0, 1.0};
  CHECK_THROWS_AS(beta_for_case(bad, 3), InvalidParamsError);
}

TEST_CASE("calibrate_sigma2 excludes the intercept") {
  Eigen::VectorXd beta(3);
  beta << 5.0, 1.0, 1.0;  // ||beta_{-1}||^2 = 2
  CHECK(calibrate_sigma2(beta, 1.0) == doctest::Approx(2.0));
  CHECK(calibrate_sigma2(beta, 2.0) == doctest::Approx(1.0));

  Eigen::VectorXd zero(3);
  zero << 5.0, 0.0, 0.0;
  CHECK_THROWS_AS(calibrate_sigma2(zero, 1.0), ZeroSignalError);

  // Direct-sum oracle for a decaying coefficient law.
  CaseSpec spec{1, 0.75, 2.0};
  const Eigen::VectorXd beta_case = beta_for_case(spec, 86);
  double direct = 0.0;
  for (int j = 2; j <= 86; ++j) direct += std::pow(static_cast<double>(j), -1.5);
  CHECK(calibrate_sigma2(beta_case, 2.0) == doctest::Approx(direct / 2.0).epsilon(1e-12));
}

TEST_CASE("oracle_simplex_loss equals a dense monotone grid") {
  RngStream rng(107, 0, 0, 99);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 2 + static_cast<int>(std::floor(4.0 * rng.next_double()));
    std::vector<double> s(static_cast<std::size_t>(m)), c(static_cast<std::size_t>(m)),
        e(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const double zy = rng.next_normal() * 2.0;
      const double zmu = rng.next_normal() * 2.0;
      s[static_cast<std::size_t>(i)] = zy * zy;
      c[static_cast<std::size_t>(i)] = zy * zmu;
      e[static_cast<std::size_t>(i)] = zmu * zmu;
    }
    const double tail = rng.next_double();
    const double exact = oracle_simplex_loss(s, c, e, tail);
    const double grid =
        tail + testutil::grid_min_monotone(
                   [&](int block, double g) {
                     const auto i = static_cast<std::size_t>(block);
                     return g * (g * s[i] - 2.0 * c[i]) + e[i];
                   },
                   m, 0.01);
    CHECK(exact <= grid + 1e-12);
    CHECK(exact >= grid - 1e-3);
  }
}

TEST_CASE("run_replicate: noiseless limit, oracle feasibility, determinism") {
  SimulationConfig config;
  config.n_values = {60};
  config.replicates = 4;
  config.seed = 2024;
  config.scenario = CaseSpec{1, 1.0, 1e8};  // essentially noiseless
  config.estimators = {EstimatorSpec::mma1(), EstimatorSpec::sma1(), EstimatorSpec::sma3()};

  SUBCASE("huge SNR drives losses to zero relative to the signal") {
    const ReplicateResult r = run_replicate(config, 60, 0);
    double mu_norm2 = 0.0;
    for (double e : r.mu_energy) mu_norm2 += e;
    mu_norm2 += r.mu_tail;
    for (double loss : r.estimator_losses) CHECK(loss / mu_norm2 < 1e-6);
  }

  SUBCASE("the all-models oracle loss lower-bounds the simplex estimator") {
    SimulationConfig noisy = config;
    noisy.scenario.snr = 2.0;
    for (int r = 0; r < 4; ++r) {
      const ReplicateResult result = run_replicate(noisy, 60, r);
      CHECK(result.oracle_loss_full <= result.estimator_losses[0] + 1e-9);  // MMA1
    }
  }

  SUBCASE("same key gives bit-identical losses") {
    const ReplicateResult a = run_replicate(config, 60, 2);
    const ReplicateResult b = run_replicate(config, 60, 2);
    for (std::size_t i = 0; i < a.estimator_losses.size(); ++i)
      CHECK(a.estimator_losses[i] == b.estimator_losses[i]);
    CHECK(a.oracle_loss_full == b.oracle_loss_full);
    CHECK(a.oracle_loss_geometric == b.oracle_loss_geometric);
  }
}

TEST_CASE("monte_carlo aggregates deterministically across thread counts") {
  SimulationConfig config;
  config.n_values = {50, 80};
  config.replicates = 6;
  config.seed = 99;
  config.scenario = CaseSpec{1, 1.0, 2.0};
  config.estimators = {EstimatorSpec::mma1(), EstimatorSpec::sma1()};
  config.mode = NormalizationMode::Table;
  config.threads = 1;
  const RiskReport serial = monte_carlo(config);

  config.threads = 4;
  const RiskReport parallel = monte_carlo(config);

  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].mean_loss == parallel.rows[i].mean_loss);
    CHECK(serial.rows[i].norm_risk == parallel.rows[i].norm_risk);
    CHECK(serial.rows[i].se == parallel.rows[i].se);
  }

  // Figure mode: normalized risk of the simplex method cannot drop below 1
  // by more than sampling noise of the denominator.
  config.mode = NormalizationMode::Figure;
  config.threads = 2;
  const RiskReport figure = monte_carlo(config);
  for (const RiskRow& row : figure.rows) {
    if (row.estimator == "MMA1") CHECK(row.norm_risk >= 1.0 - 3.0 * row.se);
    CHECK(row.se >= 0.0);
    CHECK(row.replicates == 6);
  }
}

TEST_CASE("table normalization equals the mean and SE of per-replicate ratios") {
  SimulationConfig config;
  config.n_values = {50};
  config.replicates = 5;
  config.seed = 77;
  config.scenario = CaseSpec{1, 1.0, 2.0};
  config.estimators = {EstimatorSpec::mma1(), EstimatorSpec::sma1()};
  config.mode = NormalizationMode::Table;
  const RiskReport report = monte_carlo(config);

  for (std::size_t est = 0; est < config.estimators.size(); ++est) {
    std::vector<double> ratios;
    for (int r = 0; r < config.replicates; ++r) {
      const ReplicateResult result = run_replicate(config, 50, r);
      ratios.push_back(result.estimator_losses[est] / result.oracle_loss_geometric);
    }
    double mean = 0.0;
    for (double v : ratios) mean += v;
    mean /= static_cast<double>(ratios.size());
    double ss = 0.0;
    for (double v : ratios) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (ratios.size() - 1.0) / ratios.size());

    CHECK(report.rows[est].norm_risk == doctest::Approx(mean).epsilon(1e-15));
    CHECK(report.rows[est].se == doctest::Approx(se).epsilon(1e-12));
  }
}

TEST_CASE("polynomial decay: normalized risk falls with n and ends near 1") {
  // Slow decay favors the geometric-schedule Stein estimator as n grows.
  SimulationConfig cfg;
  cfg.n_values = {50, 1500};
  cfg.replicates = 40;
  cfg.seed = 5;
  cfg.scenario = CaseSpec{1, 1.0, 1.0};
  cfg.estimators = {EstimatorSpec::sma1(), EstimatorSpec::sma2()};
  cfg.mode = NormalizationMode::Figure;
  cfg.threads = 4;
  const RiskReport report = monte_carlo(cfg);

  double sma1_small = 0.0, sma1_large = 0.0;
  for (const RiskRow& row : report.rows) {
    if (row.estimator == "SMA1" && row.n == 50) sma1_small = row.norm_risk;
    if (row.estimator == "SMA1" && row.n == 1500) sma1_large = row.norm_risk;
    if (row.n == 1500) {
      CHECK(row.norm_risk >= 1.0);
      CHECK(row.norm_risk <= 1.6);
    }
  }
  CHECK(sma1_large < sma1_small);
}

TEST_CASE("estimator specs build the documented candidate sets") {
  CHECK(EstimatorSpec::mma1().build_set(100, 86).count() == 86);
  CHECK(EstimatorSpec::mma3().build_set(100, 86).sizes ==
        std::vector<int>{4, 6, 10, 18, 32, 57, 86});
  CHECK(EstimatorSpec::mma4().build_set(100, 86).sizes.front() == 4);
  CHECK(EstimatorSpec::sma2().build_set(100, 86).sizes.front() == 2);  // nu = loglog
  CHECK(EstimatorSpec::sma3().build_set(100, 86).sizes == std::vector<int>{1, 86});
}
