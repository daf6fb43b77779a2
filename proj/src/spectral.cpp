#include "nestedma/spectral.hpp"

#include <cmath>
#include <string>

#include "nestedma/weights.hpp"

namespace nestedma {

NestedModelSet NestedModelSet::create(std::vector<int> sizes, int p_n) {
  if (sizes.empty()) throw InvalidParamsError("model set must be non-empty");
  if (p_n < 1) throw InvalidParamsError("p_n must be positive");
  if (sizes.front() < 1) throw InvalidParamsError("smallest model size must be >= 1");
  for (std::size_t m = 1; m < sizes.size(); ++m) {
    if (sizes[m] <= sizes[m - 1])
      throw InvalidParamsError("model sizes must be strictly increasing");
  }
  if (sizes.back() > p_n)
    throw InvalidParamsError("largest model size " + std::to_string(sizes.back()) +
                             " exceeds p_n = " + std::to_string(p_n));
  NestedModelSet out;
  out.sizes = std::move(sizes);
  out.p_n = p_n;
  return out;
}

OrthoBasis orthogonalize(const DesignMatrix& x) {
  const int n = x.n();
  const int p = x.p();
  if (p > n) throw InvalidParamsError("design requires p <= n");
  if (p < 1) throw InvalidParamsError("design requires p >= 1");

  // Unpivoted Householder QR: R upper triangular with nonzero diagonal makes
  // the leading columns of Q span the leading columns of X for every k.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x.values);
  const Eigen::VectorXd r_diag = qr.matrixQR().diagonal().head(p);
  double max_abs = 0.0, min_abs = std::numeric_limits<double>::infinity();
  for (int j = 0; j < p; ++j) {
    const double a = std::abs(r_diag[j]);
    max_abs = std::max(max_abs, a);
    min_abs = std::min(min_abs, a);
  }
  if (min_abs < 1e-10 * max_abs)
    throw RankDeficientError("design matrix is numerically rank deficient");

  OrthoBasis basis;
  basis.q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  basis.r_diag_min = min_abs;
  return basis;
}

BlockDecomposition decompose(const OrthoBasis& basis, const Eigen::VectorXd& y,
                             const NestedModelSet& mset, double sigma2) {
  if (y.size() != basis.q.rows()) throw DimensionMismatchError("y length != basis rows");
  if (mset.p_n != basis.p()) throw DimensionMismatchError("model set p_n != basis columns");
  if (!(sigma2 > 0.0)) throw InvalidParamsError("sigma2 must be positive");

  BlockDecomposition out;
  out.coeffs = basis.q.transpose() * y;
  out.sigma2 = sigma2;
  const int m_count = mset.count();
  out.block_energy.resize(static_cast<std::size_t>(m_count));
  out.block_noise.resize(static_cast<std::size_t>(m_count));
  int lo = 0;
  for (int m = 0; m < m_count; ++m) {
    const int hi = mset.sizes[static_cast<std::size_t>(m)];
    double energy = 0.0;
    for (int j = lo; j < hi; ++j) energy += out.coeffs[j] * out.coeffs[j];
    out.block_energy[static_cast<std::size_t>(m)] = energy;
    out.block_noise[static_cast<std::size_t>(m)] = (hi - lo) * sigma2;
    lo = hi;
  }
  double span_energy = 0.0;
  for (int j = 0; j < mset.sizes.back(); ++j) span_energy += out.coeffs[j] * out.coeffs[j];
  out.residual_energy = std::max(0.0, y.squaredNorm() - span_energy);
  return out;
}

Eigen::VectorXd reconstruct(const OrthoBasis& basis, const BlockDecomposition& decomp,
                            const NestedModelSet& mset, const CumulativeWeights& gamma) {
  if (gamma.count() != mset.count())
    throw DimensionMismatchError("gamma length != model count");
  if (decomp.coeffs.size() != basis.q.cols())
    throw DimensionMismatchError("decomposition does not match basis");

  // sum_m gamma_m y_{m} = Q (g .* z) with g_j = gamma of the block holding j.
  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(basis.q.cols());
  int lo = 0;
  for (int m = 0; m < mset.count(); ++m) {
    const int hi = mset.sizes[static_cast<std::size_t>(m)];
    for (int j = lo; j < hi; ++j)
      scaled[j] = gamma.gamma[static_cast<std::size_t>(m)] * decomp.coeffs[j];
    lo = hi;
  }
  return basis.q * scaled;
}

}  // namespace nestedma
