#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "nestedma/rng.hpp"
#include "nestedma/spectral.hpp"
#include "nestedma/weights.hpp"
#include "testutil.hpp"

using namespace nestedma;

TEST_CASE("orthogonalize: identity design gives identity basis up to signs") {
  DesignMatrix x{Eigen::MatrixXd::Identity(3, 3)};
  const OrthoBasis basis = orthogonalize(x);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const double expected = i == j ? 1.0 : 0.0;
      CHECK(std::abs(std::abs(basis.q(i, j)) - expected) < 1e-12);
    }
  }
}

TEST_CASE("orthogonalize: single column is normalized") {
  DesignMatrix x;
  x.values.resize(2, 1);
  x.values << 2.0, 0.0;
  const OrthoBasis basis = orthogonalize(x);
  CHECK(std::abs(std::abs(basis.q(0, 0)) - 1.0) < 1e-14);
  CHECK(std::abs(basis.q(1, 0)) < 1e-14);
}

TEST_CASE("orthogonalize: random design has orthonormal columns") {
  RngStream rng(7, 0, 0, 99);
  DesignMatrix x{testutil::random_matrix(20, 5, rng)};
  const OrthoBasis basis = orthogonalize(x);
  const Eigen::MatrixXd gram = basis.q.transpose() * basis.q;
  CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("orthogonalize: nested spans match explicit projectors") {
  RngStream rng(11, 0, 0, 99);
  DesignMatrix x{testutil::random_matrix(12, 4, rng)};
  const OrthoBasis basis = orthogonalize(x);
  for (int k = 1; k <= 4; ++k) {
    // P_k from the normal equations on the leading k columns.
    const Eigen::MatrixXd xk = x.values.leftCols(k);
    const Eigen::MatrixXd proj = xk * (xk.transpose() * xk).inverse() * xk.transpose();
    const Eigen::MatrixXd qk = basis.q.leftCols(k);
    CHECK((proj - qk * qk.transpose()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("orthogonalize rejects rank-deficient and wide designs") {
  DesignMatrix dup;
  dup.values.resize(4, 2);
  dup.values.col(0) << 1, 2, 3, 4;
  dup.values.col(1) = 2.0 * dup.values.col(0);
  CHECK_THROWS_AS(orthogonalize(dup), RankDeficientError);

  DesignMatrix wide{Eigen::MatrixXd::Ones(2, 3)};
  CHECK_THROWS_AS(orthogonalize(wide), InvalidParamsError);
}

TEST_CASE("decompose: containment, orthogonality, coordinate cases") {
  RngStream rng(3, 0, 0, 99);
  DesignMatrix x{testutil::random_matrix(10, 4, rng)};
  const OrthoBasis basis = orthogonalize(x);
  const NestedModelSet mset = NestedModelSet::create({2, 4}, 4);

  SUBCASE("y inside the smallest model") {
    const Eigen::VectorXd y = 1.5 * x.values.col(0) - 2.0 * x.values.col(1);
    const BlockDecomposition d = decompose(basis, y, mset, 1.0);
    CHECK(d.block_energy[0] == doctest::Approx(y.squaredNorm()).epsilon(1e-10));
    CHECK(d.block_energy[1] < 1e-18 * y.squaredNorm());
    CHECK(d.residual_energy < 1e-18 * y.squaredNorm());
  }

  SUBCASE("y orthogonal to every column") {
    Eigen::VectorXd y = testutil::random_vector(10, rng);
    y -= basis.q * (basis.q.transpose() * y);
    const BlockDecomposition d = decompose(basis, y, mset, 1.0);
    CHECK(d.block_energy[0] < 1e-16 * y.squaredNorm());
    CHECK(d.block_energy[1] < 1e-16 * y.squaredNorm());
    CHECK(d.residual_energy == doctest::Approx(y.squaredNorm()).epsilon(1e-10));
  }

  SUBCASE("identity design splits coordinates") {
    DesignMatrix eye{Eigen::MatrixXd::Identity(3, 3)};
    const OrthoBasis b = orthogonalize(eye);
    Eigen::VectorXd y(3);
    y << 1.0, -2.0, 3.0;
    const BlockDecomposition d = decompose(b, y, NestedModelSet::create({1, 2, 3}, 3), 0.5);
    CHECK(d.block_energy[0] == doctest::Approx(1.0));
    CHECK(d.block_energy[1] == doctest::Approx(4.0));
    CHECK(d.block_energy[2] == doctest::Approx(9.0));
    CHECK(d.block_noise[0] == doctest::Approx(0.5));
  }
}

TEST_CASE("decompose: energy conservation and noise levels") {
  RngStream rng(5, 0, 0, 99);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 8 + static_cast<int>(std::floor(20.0 * rng.next_double()));
    const int p = 2 + static_cast<int>(std::floor(5.0 * rng.next_double()));
    DesignMatrix x{testutil::random_matrix(n, p, rng)};
    const OrthoBasis basis = orthogonalize(x);
    const NestedModelSet mset = NestedModelSet::create({1, p}, p);
    const Eigen::VectorXd y = testutil::random_vector(n, rng);
    const BlockDecomposition d = decompose(basis, y, mset, 2.0);

    double total = d.residual_energy;
    for (double e : d.block_energy) total += e;
    CHECK(total == doctest::Approx(y.squaredNorm()).epsilon(1e-8));
    CHECK(d.block_noise[0] == doctest::Approx(2.0));
    CHECK(d.block_noise[1] == doctest::Approx(2.0 * (p - 1)));
  }
}

TEST_CASE("decompose: projections onto smaller models leave later blocks empty") {
  RngStream rng(13, 0, 0, 99);
  DesignMatrix x{testutil::random_matrix(15, 6, rng)};
  const OrthoBasis basis = orthogonalize(x);
  const NestedModelSet mset = NestedModelSet::create({2, 4, 6}, 6);
  const Eigen::VectorXd y0 = testutil::random_vector(15, rng);
  // Project y0 onto the span of the first 4 columns.
  const Eigen::MatrixXd q4 = basis.q.leftCols(4);
  const Eigen::VectorXd y = q4 * (q4.transpose() * y0);
  const BlockDecomposition d = decompose(basis, y, mset, 1.0);
  CHECK(d.block_energy[2] < 1e-16 * y0.squaredNorm());
  CHECK(d.residual_energy < 1e-16 * y0.squaredNorm());
}

TEST_CASE("decompose dimension errors") {
  DesignMatrix x{Eigen::MatrixXd::Identity(4, 3)};
  const OrthoBasis basis = orthogonalize(x);
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
  CHECK_THROWS_AS(decompose(basis, Eigen::VectorXd::Ones(5),
                            NestedModelSet::create({1, 3}, 3), 1.0),
                  DimensionMismatchError);
  CHECK_THROWS_AS(decompose(basis, y, NestedModelSet::create({1, 2}, 2), 1.0),
                  DimensionMismatchError);
  CHECK_THROWS_AS(decompose(basis, y, NestedModelSet::create({1, 3}, 3), 0.0),
                  InvalidParamsError);
}

TEST_CASE("reconstruct: zero, full, and mixed cumulative weights") {
  RngStream rng(17, 0, 0, 99);
  DesignMatrix x{testutil::random_matrix(5, 2, rng)};
  const OrthoBasis basis = orthogonalize(x);
  const NestedModelSet mset = NestedModelSet::create({1, 2}, 2);
  const Eigen::VectorXd y = testutil::random_vector(5, rng);
  const BlockDecomposition d = decompose(basis, y, mset, 1.0);

  SUBCASE("zeros give the zero vector") {
    const Eigen::VectorXd fit = reconstruct(basis, d, mset, CumulativeWeights{{0.0, 0.0}});
    CHECK(fit.norm() < 1e-14);
  }

  SUBCASE("ones give the full projection, energies add up") {
    const Eigen::VectorXd fit = reconstruct(basis, d, mset, CumulativeWeights{{1.0, 1.0}});
    const double blocks = d.block_energy[0] + d.block_energy[1];
    CHECK(fit.squaredNorm() == doctest::Approx(blocks).epsilon(1e-8));
    const Eigen::VectorXd proj = basis.q * (basis.q.transpose() * y);
    CHECK((fit - proj).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("gamma (1, 0.5) equals the half/half projector average") {
    const Eigen::VectorXd fit = reconstruct(basis, d, mset, CumulativeWeights{{1.0, 0.5}});
    const Eigen::MatrixXd q1 = basis.q.leftCols(1);
    const Eigen::VectorXd p1 = q1 * (q1.transpose() * y);
    const Eigen::VectorXd p2 = basis.q * (basis.q.transpose() * y);
    CHECK((fit - 0.5 * (p1 + p2)).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("length mismatch throws") {
    CHECK_THROWS_AS(reconstruct(basis, d, mset, CumulativeWeights{{1.0}}),
                    DimensionMismatchError);
  }
}

TEST_CASE("reconstruct is linear in gamma") {
  RngStream rng(19, 0, 0, 99);
  DesignMatrix x{testutil::random_matrix(12, 5, rng)};
  const OrthoBasis basis = orthogonalize(x);
  const NestedModelSet mset = NestedModelSet::create({1, 3, 5}, 5);
  const Eigen::VectorXd y = testutil::random_vector(12, rng);
  const BlockDecomposition d = decompose(basis, y, mset, 1.0);

  const CumulativeWeights g1{{0.9, 0.4, 0.1}};
  const CumulativeWeights g2{{0.3, 0.3, 0.2}};
  const double a = 0.7, b = -1.3;
  CumulativeWeights mix;
  for (int m = 0; m < 3; ++m)
    mix.gamma.push_back(a * g1.gamma[static_cast<std::size_t>(m)] +
                        b * g2.gamma[static_cast<std::size_t>(m)]);
  const Eigen::VectorXd lhs = reconstruct(basis, d, mset, mix);
  const Eigen::VectorXd rhs =
      a * reconstruct(basis, d, mset, g1) + b * reconstruct(basis, d, mset, g2);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("weight and cumulative-weight forms agree with explicit projectors") {
  RngStream rng(23, 0, 0, 99);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 10 + static_cast<int>(std::floor(40.0 * rng.next_double()));
    const int p = 3 + static_cast<int>(std::floor(4.0 * rng.next_double()));
    DesignMatrix x{testutil::random_matrix(n, p, rng)};
    const OrthoBasis basis = orthogonalize(x);
    const NestedModelSet mset = NestedModelSet::create({1, 2, p}, p);
    const Eigen::VectorXd y = testutil::random_vector(n, rng);
    const BlockDecomposition d = decompose(basis, y, mset, 1.0);

    WeightVector w{{0.2, 0.5, 0.3}};
    const Eigen::VectorXd fit = reconstruct(basis, d, mset, gamma_from_weights(w));
    Eigen::VectorXd by_projectors = Eigen::VectorXd::Zero(n);
    for (int m = 0; m < 3; ++m) {
      const Eigen::MatrixXd qk = basis.q.leftCols(mset.sizes[static_cast<std::size_t>(m)]);
      by_projectors += w.w[static_cast<std::size_t>(m)] * (qk * (qk.transpose() * y));
    }
    CHECK((fit - by_projectors).cwiseAbs().maxCoeff() < 1e-8);
  }
}
