#include "nestedma/weights.hpp"

#include <algorithm>
#include <cmath>

namespace nestedma {

bool WeightVector::in_simplex(double tol) const {
  double sum = 0.0;
  for (double v : w) {
    if (v < -tol || v > 1.0 + tol) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

bool WeightVector::in_relaxed_set(double tol) const {
  double suffix = 0.0;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    suffix += *it;
    if (suffix < -tol || suffix > 1.0 + tol) return false;
  }
  return true;
}

bool CumulativeWeights::in_monotone_set(double tol) const {
  if (gamma.empty()) return false;
  if (std::abs(gamma.front() - 1.0) > tol) return false;
  for (std::size_t m = 1; m < gamma.size(); ++m) {
    if (gamma[m] > gamma[m - 1] + tol) return false;
  }
  return gamma.back() >= -tol;
}

bool CumulativeWeights::in_hypercube(double tol) const {
  for (double g : gamma) {
    if (g < -tol || g > 1.0 + tol) return false;
  }
  return true;
}

CumulativeWeights gamma_from_weights(const WeightVector& w) {
  CumulativeWeights out;
  out.gamma.resize(w.w.size());
  double suffix = 0.0;
  for (std::size_t m = w.w.size(); m-- > 0;) {
    suffix += w.w[m];
    out.gamma[m] = suffix;
  }
  return out;
}

WeightVector weights_from_gamma(const CumulativeWeights& g) {
  WeightVector out;
  out.w.resize(g.gamma.size());
  for (std::size_t m = 0; m < g.gamma.size(); ++m) {
    const double next = (m + 1 < g.gamma.size()) ? g.gamma[m + 1] : 0.0;
    out.w[m] = g.gamma[m] - next;
  }
  return out;
}

double mma_criterion(const BlockDecomposition& decomp, const CumulativeWeights& g,
                     double penalty_coef) {
  if (g.count() != decomp.count())
    throw DimensionMismatchError("gamma length != block count");
  double value = decomp.residual_energy;
  for (std::size_t m = 0; m < g.gamma.size(); ++m) {
    const double one_minus = 1.0 - g.gamma[m];
    value += decomp.block_energy[m] * one_minus * one_minus +
             penalty_coef * decomp.block_noise[m] * g.gamma[m];
  }
  return value;
}

std::vector<double> pava_antitonic(const std::vector<double>& targets,
                                   const std::vector<double>& weights, double lower,
                                   double upper, std::optional<double> pin_first) {
  if (targets.empty()) throw EmptyInputError("pava: empty input");
  if (targets.size() != weights.size())
    throw DimensionMismatchError("pava: targets/weights length mismatch");
  if (lower > upper) throw InvalidParamsError("pava: lower > upper");
  if (pin_first && (*pin_first < lower || *pin_first > upper))
    throw InvalidParamsError("pava: pin outside bounds");

  std::size_t begin = 0;
  double box_hi = upper;
  std::vector<double> out(targets.size());
  if (pin_first) {
    out[0] = *pin_first;
    box_hi = std::min(upper, *pin_first);
    begin = 1;
    if (targets.size() == 1) return out;
  }

  struct Pool {
    double weight;
    double weighted_sum;
    std::size_t count;
    double value() const { return weight > 0.0 ? weighted_sum / weight : 0.0; }
  };
  std::vector<Pool> pools;
  pools.reserve(targets.size() - begin);
  for (std::size_t i = begin; i < targets.size(); ++i) {
    pools.push_back({weights[i], weights[i] * targets[i], 1});
    // Antitonic: merge while the previous pool sits below the new one.
    while (pools.size() >= 2 && pools[pools.size() - 2].value() <= pools.back().value()) {
      Pool last = pools.back();
      pools.pop_back();
      pools.back().weight += last.weight;
      pools.back().weighted_sum += last.weighted_sum;
      pools.back().count += last.count;
    }
  }

  std::size_t i = begin;
  for (const Pool& pool : pools) {
    const double v = std::clamp(pool.value(), lower, box_hi);
    for (std::size_t c = 0; c < pool.count; ++c) out[i++] = v;
  }
  return out;
}

CumulativeWeights solve_mma_simplex(const BlockDecomposition& decomp, double penalty_coef) {
  if (decomp.count() < 1) throw EmptyInputError("solver requires at least one block");
  if (!(penalty_coef > 0.0)) throw InvalidParamsError("penalty coefficient must be positive");

  const std::size_t m_count = decomp.block_energy.size();
  std::vector<double> targets(m_count), pool_weights(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    const double s = decomp.block_energy[m];
    // s (1-g)^2 + c*noise*g = s (g - b)^2 + const with b = 1 - c*noise/(2s).
    targets[m] = s > 0.0 ? 1.0 - penalty_coef * decomp.block_noise[m] / (2.0 * s) : 0.0;
    pool_weights[m] = s;
  }
  CumulativeWeights out;
  out.gamma = pava_antitonic(targets, pool_weights, 0.0, 1.0, 1.0);
  return out;
}

CumulativeWeights solve_relaxed(const BlockDecomposition& decomp, const PenaltySchedule& phi) {
  if (phi.count() != decomp.count())
    throw DimensionMismatchError("penalty schedule length != block count");
  CumulativeWeights out;
  out.gamma.resize(decomp.block_energy.size());
  for (std::size_t m = 0; m < out.gamma.size(); ++m) {
    const double s = decomp.block_energy[m];
    out.gamma[m] =
        s > 0.0 ? std::max(0.0, 1.0 - decomp.block_noise[m] * (1.0 + phi.phi[m]) / s) : 0.0;
  }
  return out;
}

PenaltySchedule penalty_schedule(const NestedModelSet& mset, double tau) {
  if (!(tau > 0.0 && tau < 0.5))
    throw InvalidParamsError("penalty exponent must lie in (0, 1/2)");
  PenaltySchedule out;
  out.tau = tau;
  out.phi.resize(static_cast<std::size_t>(mset.count()));
  for (int m = 0; m < mset.count(); ++m) {
    const double raw = std::pow(static_cast<double>(mset.block_size(m)), -tau);
    out.phi[static_cast<std::size_t>(m)] = std::min(raw, 1.0 - 1e-9);
  }
  return out;
}

PenaltySchedule zero_penalty(int count) {
  if (count < 1) throw EmptyInputError("zero_penalty requires count >= 1");
  PenaltySchedule out;
  out.phi.assign(static_cast<std::size_t>(count), 0.0);
  return out;
}

}  // namespace nestedma
