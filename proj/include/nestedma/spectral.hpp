#ifndef NESTEDMA_SPECTRAL_HPP
#define NESTEDMA_SPECTRAL_HPP

#include <Eigen/Dense>
#include <vector>

#include "nestedma/errors.hpp"

namespace nestedma {

struct CumulativeWeights;  // weights.hpp

/// Regression design X for y = X beta + eps. Requires p <= n; full column
/// rank is verified by orthogonalize(), not here.
struct DesignMatrix {
  Eigen::MatrixXd values;  // n x p, column-major (Eigen default)

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }
};

/// Orthonormal basis of the column space of X with the nested-span property:
/// for every k, the first k columns of q span the same subspace as the first
/// k columns of X. Produced by an unpivoted Householder factorization.
struct OrthoBasis {
  Eigen::MatrixXd q;         // n x p, orthonormal columns
  double r_diag_min = 0.0;   // smallest |diagonal| of the triangular factor

  int n() const { return static_cast<int>(q.rows()); }
  int p() const { return static_cast<int>(q.cols()); }
};

/// Candidate model sizes k_1 < k_2 < ... < k_M <= p_n. The m-th candidate
/// model consists of the first k_m regressors.
struct NestedModelSet {
  std::vector<int> sizes;
  int p_n = 0;

  int count() const { return static_cast<int>(sizes.size()); }
  // Block width k_m - k_{m-1} with k_0 = 0; m is zero-based here.
  int block_size(int m) const {
    return sizes[static_cast<std::size_t>(m)] - (m == 0 ? 0 : sizes[static_cast<std::size_t>(m) - 1]);
  }

  // Validates: non-empty, 1 <= k_1, strictly increasing, k_M <= p_n.
  static NestedModelSet create(std::vector<int> sizes, int p_n);
};

/// Sufficient statistics of y in the block-orthogonal basis of a model set:
/// per-block response energies, per-block noise levels, and the energy
/// outside the largest model. Every estimator operates on this alone.
struct BlockDecomposition {
  std::vector<double> block_energy;  // ||y_{m}||^2 per block
  std::vector<double> block_noise;   // (k_m - k_{m-1}) * sigma^2
  double residual_energy = 0.0;      // ||y - P_{k_M} y||^2
  Eigen::VectorXd coeffs;            // z = q^T y, all p_n coefficients
  double sigma2 = 0.0;

  int count() const { return static_cast<int>(block_energy.size()); }
};

/// Householder factorization of X. Throws RankDeficientError when the
/// smallest triangular diagonal falls below 1e-10 of the largest.
OrthoBasis orthogonalize(const DesignMatrix& x);

/// Splits y into the orthogonal block statistics of mset. sigma2 must be
/// positive; the blocks' noise levels are (k_m - k_{m-1}) * sigma2.
BlockDecomposition decompose(const OrthoBasis& basis, const Eigen::VectorXd& y,
                             const NestedModelSet& mset, double sigma2);

/// Fitted vector sum_m gamma_m y_{m}. gamma of all ones gives the
/// full-model least-squares fit P_{k_M} y.
Eigen::VectorXd reconstruct(const OrthoBasis& basis, const BlockDecomposition& decomp,
                            const NestedModelSet& mset, const CumulativeWeights& gamma);

}  // namespace nestedma

#endif
