#include "nestedma/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nestedma {

namespace {

// Shrinkage term a*b/(a+b) with the 0/0 block contributing nothing.
inline double shrink_term(double mu, double noise) {
  const double denom = mu + noise;
  return denom > 0.0 ? mu * noise / denom : 0.0;
}

inline double attaining_gamma(double mu, double noise) {
  const double denom = mu + noise;
  return denom > 0.0 ? mu / denom : 0.0;
}

}  // namespace

SignalDecomposition signal_decompose(const OrthoBasis& basis, const Eigen::VectorXd& mu,
                                     const NestedModelSet& mset, double sigma2) {
  const BlockDecomposition d = decompose(basis, mu, mset, sigma2);
  SignalDecomposition out;
  out.mu_energy = d.block_energy;
  out.mu_tail = d.residual_energy;
  out.block_noise = d.block_noise;
  out.sizes = mset;
  out.sigma2 = sigma2;
  return out;
}

SignalDecomposition regroup(const SignalDecomposition& sig, const NestedModelSet& subset) {
  if (subset.sizes.front() != sig.sizes.sizes.front() ||
      subset.sizes.back() != sig.sizes.sizes.back())
    throw InvalidParamsError("regroup: subset must keep both endpoints");
  if (!std::includes(sig.sizes.sizes.begin(), sig.sizes.sizes.end(), subset.sizes.begin(),
                     subset.sizes.end()))
    throw InvalidParamsError("regroup: not a subset of the model sizes");

  SignalDecomposition out;
  out.sizes = subset;
  out.sigma2 = sig.sigma2;
  out.mu_tail = sig.mu_tail;
  out.mu_energy.resize(subset.sizes.size(), 0.0);
  out.block_noise.resize(subset.sizes.size(), 0.0);
  std::size_t l = 0;
  for (std::size_t m = 0; m < sig.sizes.sizes.size(); ++m) {
    if (sig.sizes.sizes[m] > subset.sizes[l]) ++l;
    out.mu_energy[l] += sig.mu_energy[m];
    out.block_noise[l] += sig.block_noise[m];
  }
  return out;
}

double ma_risk(const SignalDecomposition& sig, const CumulativeWeights& g) {
  if (g.count() != sig.count()) throw DimensionMismatchError("gamma length != block count");
  double value = sig.mu_tail;
  for (std::size_t m = 0; m < sig.mu_energy.size(); ++m) {
    const double one_minus = 1.0 - g.gamma[m];
    value += sig.mu_energy[m] * one_minus * one_minus +
             sig.block_noise[m] * g.gamma[m] * g.gamma[m];
  }
  return value;
}

RelaxedOptimum optimal_relaxed_risk(const SignalDecomposition& sig) {
  RelaxedOptimum out;
  out.risk = sig.mu_tail;
  out.gamma.gamma.resize(sig.mu_energy.size());
  for (std::size_t m = 0; m < sig.mu_energy.size(); ++m) {
    out.risk += shrink_term(sig.mu_energy[m], sig.block_noise[m]);
    out.gamma.gamma[m] = attaining_gamma(sig.mu_energy[m], sig.block_noise[m]);
  }
  return out;
}

NestedModelSet reduce_to_MT(const SignalDecomposition& sig) {
  if (sig.count() < 2) throw InvalidParamsError("reduction requires at least two models");

  NestedModelSet current = sig.sizes;
  while (current.count() > 2) {
    const SignalDecomposition grouped = regroup(sig, current);
    // Interior positions (1-based l in 2..count-1) where SNR_l < SNR_{l+1}.
    std::vector<bool> remove(static_cast<std::size_t>(current.count()), false);
    bool any = false;
    for (int l = 1; l + 1 < current.count(); ++l) {
      if (grouped.snr(l) < grouped.snr(l + 1)) {
        remove[static_cast<std::size_t>(l)] = true;
        any = true;
      }
    }
    if (!any) break;
    std::vector<int> kept;
    for (int l = 0; l < current.count(); ++l) {
      if (!remove[static_cast<std::size_t>(l)]) kept.push_back(current.sizes[static_cast<std::size_t>(l)]);
    }
    current = NestedModelSet::create(std::move(kept), current.p_n);
  }
  return current;
}

SimplexOptimum optimal_simplex_risk(const SignalDecomposition& sig) {
  SimplexOptimum out;
  if (sig.count() == 1) {
    out.risk = sig.block_noise[0] + sig.mu_tail;
    out.weights.w = {1.0};
    return out;
  }

  const NestedModelSet reduced = reduce_to_MT(sig);
  const SignalDecomposition grouped = regroup(sig, reduced);

  CumulativeWeights gamma_reduced;
  gamma_reduced.gamma.resize(grouped.mu_energy.size());
  gamma_reduced.gamma[0] = 1.0;
  out.risk = grouped.block_noise[0] + grouped.mu_tail;
  for (std::size_t l = 1; l < grouped.mu_energy.size(); ++l) {
    out.risk += shrink_term(grouped.mu_energy[l], grouped.block_noise[l]);
    gamma_reduced.gamma[l] = attaining_gamma(grouped.mu_energy[l], grouped.block_noise[l]);
  }

  // Map the reduced-set weights back, leaving zeros on removed models.
  const WeightVector w_reduced = weights_from_gamma(gamma_reduced);
  out.weights.w.assign(sig.mu_energy.size(), 0.0);
  std::size_t l = 0;
  for (std::size_t m = 0; m < sig.sizes.sizes.size(); ++m) {
    if (l < reduced.sizes.size() && sig.sizes.sizes[m] == reduced.sizes[l]) {
      out.weights.w[m] = w_reduced.w[l];
      ++l;
    }
  }
  return out;
}

SnrDiagnostics snr_diagnostics(const SignalDecomposition& sig) {
  SnrDiagnostics out;

  std::vector<std::size_t> order(sig.mu_energy.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return sig.snr(static_cast<int>(a)) > sig.snr(static_cast<int>(b));
                   });
  double strong_noise = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (sig.snr(static_cast<int>(order[rank])) >= 1.0) {
      ++out.m_star;
      strong_noise += sig.block_noise[order[rank]];
    }
  }

  out.l_star = 1;
  double reduced_noise = 0.0;
  if (sig.count() >= 2) {
    const NestedModelSet reduced = reduce_to_MT(sig);
    const SignalDecomposition grouped = regroup(sig, reduced);
    for (int l = 1; l < grouped.count(); ++l) {
      if (grouped.snr(l) >= 1.0) ++out.l_star;
    }
    for (int l = 0; l < out.l_star; ++l) reduced_noise += grouped.block_noise[static_cast<std::size_t>(l)];
  } else {
    reduced_noise = sig.block_noise[0];
  }

  out.ratio_bound = reduced_noise > 0.0 ? strong_noise / reduced_noise : 0.0;
  return out;
}

double penalized_stein_bound(const SignalDecomposition& sig, const AssumptionReport& report) {
  if (!std::isfinite(report.phi_bar))
    throw PhiZeroError("bound undefined for zero penalties; use the unpenalized bound");
  return (1.0 + report.phi_bar) * optimal_relaxed_risk(sig).risk +
         8.0 * report.c1_lhs * sig.sigma2;
}

double stein_bound(const SignalDecomposition& sig, int model_count) {
  return optimal_relaxed_risk(sig).risk + 4.0 * model_count * sig.sigma2;
}

double full_potential_bound(const SignalDecomposition& sig_on_all,
                            const AssumptionReport& report, int k1) {
  if (!std::isfinite(report.phi_bar))
    throw PhiZeroError("bound undefined for zero penalties");
  const double optimal = optimal_simplex_risk(sig_on_all).risk;
  return (1.0 + report.phi_bar) * (1.0 + report.zeta) * optimal +
         (8.0 * report.c1_lhs + k1 * (1.0 + report.phi_bar)) * sig_on_all.sigma2;
}

}  // namespace nestedma
