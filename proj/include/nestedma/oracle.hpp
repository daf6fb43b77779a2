#ifndef NESTEDMA_ORACLE_HPP
#define NESTEDMA_ORACLE_HPP

#include <limits>

#include "nestedma/candidates.hpp"
#include "nestedma/spectral.hpp"
#include "nestedma/weights.hpp"

namespace nestedma {

/// Block statistics of the true mean vector: per-block signal energies, the
/// energy outside the largest model, and the block noise levels. Exact risk
/// formulas are functions of this alone.
struct SignalDecomposition {
  std::vector<double> mu_energy;    // ||mu_{m}||^2 per block
  double mu_tail = 0.0;             // ||mu - P_{k_M} mu||^2
  std::vector<double> block_noise;  // (k_m - k_{m-1}) * sigma^2
  NestedModelSet sizes;
  double sigma2 = 0.0;

  int count() const { return static_cast<int>(mu_energy.size()); }
  double snr(int m) const {
    const auto i = static_cast<std::size_t>(m);
    return block_noise[i] > 0.0 ? mu_energy[i] / block_noise[i]
                                : (mu_energy[i] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  }
};

/// decompose() applied to the true mean vector.
SignalDecomposition signal_decompose(const OrthoBasis& basis, const Eigen::VectorXd& mu,
                                     const NestedModelSet& mset, double sigma2);

/// Re-expresses the block statistics against a subset of the model sizes by
/// summing energies between consecutive subset sizes. Valid because the
/// orthogonal decomposition is refinement-consistent.
SignalDecomposition regroup(const SignalDecomposition& sig, const NestedModelSet& subset);

/// Exact risk of the fixed-gamma linear estimator:
///   sum_m [ mu_m (1 - gamma_m)^2 + noise_m gamma_m^2 ] + tail.
double ma_risk(const SignalDecomposition& sig, const CumulativeWeights& g);

struct RelaxedOptimum {
  double risk = 0.0;
  CumulativeWeights gamma;
};

/// Minimal risk over the hypercube, attained at
/// gamma_m = mu_m / (mu_m + noise_m); value sum_m mu_m noise_m/(mu_m+noise_m) + tail.
RelaxedOptimum optimal_relaxed_risk(const SignalDecomposition& sig);

/// Largest sub-model-set whose block SNRs from the second position onward
/// are non-increasing. Iteratively removes every interior position where
/// SNR_l < SNR_{l+1} (recomputed against the reduced set each round);
/// endpoints are never removed. Requires at least two models.
NestedModelSet reduce_to_MT(const SignalDecomposition& sig);

struct SimplexOptimum {
  double risk = 0.0;
  WeightVector weights;  // on the original model set; zeros on removed models
};

/// Minimal risk over the unit simplex. Equals the relaxed optimum on the
/// reduced set except that the first block keeps full weight:
///   noise'_1 + sum_{l>=2} mu'_l noise'_l/(mu'_l + noise'_l) + tail.
SimplexOptimum optimal_simplex_risk(const SignalDecomposition& sig);

struct SnrDiagnostics {
  int m_star = 0;        // blocks with SNR >= 1
  int l_star = 1;        // 1 + reduced-set blocks at positions >= 2 with SNR >= 1
  double ratio_bound = 0.0;  // noise mass of the m* strongest blocks over
                             // the first l* reduced-set noise levels
};

SnrDiagnostics snr_diagnostics(const SignalDecomposition& sig);

/// Oracle bound for the penalized blockwise Stein rule:
///   (1 + phi_bar) * relaxed optimum + 8 * c1 * sigma^2.
/// Throws PhiZeroError when the report's phi_bar is infinite.
double penalized_stein_bound(const SignalDecomposition& sig, const AssumptionReport& report);

/// Bound for the unpenalized Stein rule: relaxed optimum + 4 M sigma^2.
double stein_bound(const SignalDecomposition& sig, int model_count);

/// Full-potential bound for the penalized rule on a schedule-constrained set:
///   (1 + phi_bar)(1 + zeta) * simplex optimum over all nested models
///   + [8 c1 + k_1 (1 + phi_bar)] sigma^2.
/// sig_on_all must be the decomposition against the all-models set.
double full_potential_bound(const SignalDecomposition& sig_on_all,
                            const AssumptionReport& report, int k1);

}  // namespace nestedma

#endif
