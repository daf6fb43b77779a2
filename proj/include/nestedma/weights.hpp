#ifndef NESTEDMA_WEIGHTS_HPP
#define NESTEDMA_WEIGHTS_HPP

#include <optional>
#include <vector>

#include "nestedma/spectral.hpp"

namespace nestedma {

/// Model weights w_1..w_M. Membership in the unit simplex or in the relaxed
/// set (all reverse cumulative sums in [0,1]) is checked, never assumed.
struct WeightVector {
  std::vector<double> w;

  int count() const { return static_cast<int>(w.size()); }
  bool in_simplex(double tol = 1e-8) const;
  bool in_relaxed_set(double tol = 1e-8) const;
};

/// Cumulative weights gamma_m = sum_{j>=m} w_j. The simplex maps to the
/// monotone set 1 = gamma_1 >= ... >= gamma_M >= 0; the relaxed weight set
/// maps to the hypercube [0,1]^M.
struct CumulativeWeights {
  std::vector<double> gamma;

  int count() const { return static_cast<int>(gamma.size()); }
  bool in_monotone_set(double tol = 1e-8) const;
  bool in_hypercube(double tol = 1e-8) const;
};

/// Blockwise shrinkage penalties, 0 <= phi_m < 1.
struct PenaltySchedule {
  std::vector<double> phi;
  double tau = 0.0;

  int count() const { return static_cast<int>(phi.size()); }
};

CumulativeWeights gamma_from_weights(const WeightVector& w);

/// Inverse transform w_m = gamma_m - gamma_{m+1} with gamma_{M+1} = 0.
WeightVector weights_from_gamma(const CumulativeWeights& g);

/// Unbiased risk criterion in cumulative-weight form:
///   sum_m [ s_m (1 - gamma_m)^2 + penalty_coef * noise_m * gamma_m ] + residual.
/// penalty_coef = 2 is the standard Mallows penalty; log n gives the
/// parsimonious variant.
double mma_criterion(const BlockDecomposition& decomp, const CumulativeWeights& g,
                     double penalty_coef);

/// Exact minimizer of mma_criterion over the monotone set (equivalently, of
/// the weight-form criterion over the unit simplex). Solved as bounded
/// weighted antitonic least squares via PAVA: completing the square gives
/// per-block targets b_m = 1 - penalty_coef * noise_m / (2 s_m) with weights
/// s_m. Zero-energy blocks enter with weight zero and follow their pool.
CumulativeWeights solve_mma_simplex(const BlockDecomposition& decomp, double penalty_coef);

/// Penalized blockwise Stein rule, the closed-form minimizer over the
/// hypercube: gamma_m = max(0, 1 - noise_m (1 + phi_m) / s_m), and 0 when
/// s_m = 0. phi = 0 recovers the plain positive-part rule.
CumulativeWeights solve_relaxed(const BlockDecomposition& decomp, const PenaltySchedule& phi);

/// phi_m = (k_m - k_{m-1})^{-tau} for tau in (0, 1/2), clamped to < 1 so
/// unit-width blocks stay inside the valid penalty range.
PenaltySchedule penalty_schedule(const NestedModelSet& mset, double tau);

/// All-zero penalties (the unpenalized Stein rule).
PenaltySchedule zero_penalty(int count);

/// Weighted least-squares fit under x_1 >= x_2 >= ... >= x_M and box
/// [lower, upper]. Pool-adjacent-violators with weighted pool means, then a
/// clip to the box. pin_first fixes x_1 and solves the rest with upper bound
/// min(upper, pin_first). Pools of total weight zero take value 0 until
/// merged into a weighted neighbor.
std::vector<double> pava_antitonic(const std::vector<double>& targets,
                                   const std::vector<double>& weights, double lower,
                                   double upper,
                                   std::optional<double> pin_first = std::nullopt);

}  // namespace nestedma

#endif
