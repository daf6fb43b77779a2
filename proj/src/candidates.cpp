#include "nestedma/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace nestedma {

ScheduleParams ScheduleParams::create(int nu, int p_n) {
  if (nu < 2) throw InvalidParamsError("schedule requires nu >= 2");
  if (p_n < nu) throw InvalidParamsError("schedule requires p_n >= nu");
  ScheduleParams out;
  out.nu = nu;
  out.rho = 1.0 / std::log(static_cast<double>(nu));
  out.p_n = p_n;
  return out;
}

NestedModelSet full_nested_set(int p_n) {
  if (p_n < 1) throw InvalidParamsError("p_n must be >= 1");
  std::vector<int> sizes(static_cast<std::size_t>(p_n));
  std::iota(sizes.begin(), sizes.end(), 1);
  return NestedModelSet::create(std::move(sizes), p_n);
}

NestedModelSet geometric_set(const ScheduleParams& params) {
  if (params.nu < 2 || params.nu > params.p_n)
    throw InvalidParamsError("invalid schedule parameters");
  std::vector<int> sizes{params.nu};
  const double base = params.nu * params.rho;
  double growth = 1.0;
  while (true) {
    const int increment = std::max(1, static_cast<int>(std::floor(base * growth)));
    const int next = sizes.back() + increment;
    if (next > params.p_n) break;
    sizes.push_back(next);
    growth *= 1.0 + params.rho;
  }
  if (sizes.back() < params.p_n) sizes.push_back(params.p_n);
  return NestedModelSet::create(std::move(sizes), params.p_n);
}

NestedModelSet equal_block_set(int p_n, int block) {
  if (p_n < 1) throw InvalidParamsError("p_n must be >= 1");
  if (block < 1) throw InvalidParamsError("block must be >= 1");
  std::vector<int> sizes;
  for (int k = block; k <= p_n; k += block) sizes.push_back(k);
  if (sizes.empty() || sizes.back() < p_n) sizes.push_back(p_n);
  return NestedModelSet::create(std::move(sizes), p_n);
}

NestedModelSet two_model_set(int p_n) {
  if (p_n < 2) throw InvalidParamsError("two-model set requires p_n >= 2");
  return NestedModelSet::create({1, p_n}, p_n);
}

int nu_choice(int n, NuMode mode) {
  if (n < 3) throw InvalidParamsError("nu_choice requires n >= 3");
  const double inner = std::log(static_cast<double>(n));
  const double value = mode == NuMode::Log ? inner : std::log(inner);
  return std::max(2, static_cast<int>(std::floor(value)));
}

AssumptionReport check_assumptions(const NestedModelSet& mset, const PenaltySchedule& phi) {
  if (phi.count() != mset.count())
    throw DimensionMismatchError("penalty schedule length != model count");

  AssumptionReport report;
  report.a2_ok = true;
  report.a2add_ok = true;
  report.phi_bar = 0.0;
  for (int m = 0; m < mset.count(); ++m) {
    const double d = static_cast<double>(mset.block_size(m));
    const double p = phi.phi[static_cast<std::size_t>(m)];
    const double root = 1.0 + 2.0 * std::sqrt(p);
    report.c1_lhs += std::exp(-d * p * p / (16.0 * root * root));
    if (1.0 / d > (1.0 - p) / 4.0) report.a2_ok = false;
    if (d <= 3.0) report.a2add_ok = false;
    const double term = p > 0.0 ? 2.0 * p + 16.0 / (d * p)
                                : std::numeric_limits<double>::infinity();
    report.phi_bar = std::max(report.phi_bar, term);
  }
  report.zeta = 0.0;
  for (int m = 0; m + 1 < mset.count(); ++m) {
    const double ratio = static_cast<double>(mset.block_size(m + 1)) / mset.block_size(m);
    report.zeta = std::max(report.zeta, ratio - 1.0);
  }
  return report;
}

}  // namespace nestedma
