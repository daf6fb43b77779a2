#ifndef NESTEDMA_CANDIDATES_HPP
#define NESTEDMA_CANDIDATES_HPP

#include "nestedma/spectral.hpp"
#include "nestedma/weights.hpp"

namespace nestedma {

/// Parameters of the weakly geometric model schedule: first model size nu,
/// growth rate rho = 1/log(nu), ambient regressor count p_n.
struct ScheduleParams {
  int nu = 2;
  double rho = 0.0;
  int p_n = 0;

  // Requires nu >= 2 (rho finite, positive) and nu <= p_n.
  static ScheduleParams create(int nu, int p_n);
};

/// All nested models {1, 2, ..., p_n}.
NestedModelSet full_nested_set(int p_n);

/// Weakly geometric schedule: k_1 = nu, then increments
/// floor(nu * rho * (1+rho)^(j-1)) for j = 1, 2, ... (forced >= 1) while the
/// cumulative size stays <= p_n, with p_n appended as the final model.
NestedModelSet geometric_set(const ScheduleParams& params);

/// Multiples of `block` up to p_n, with p_n appended when it is not one.
NestedModelSet equal_block_set(int p_n, int block);

/// Intercept model and full model only: {1, p_n}.
NestedModelSet two_model_set(int p_n);

enum class NuMode { Log, LogLog };

/// floor(log n) or floor(log log n), natural logs, clamped below at 2.
int nu_choice(int n, NuMode mode);

/// Diagnostics for the oracle-inequality assumptions of a (model set,
/// penalty schedule) pair.
struct AssumptionReport {
  // sum_m exp(-d_m phi_m^2 / (16 (1 + 2 sqrt(phi_m))^2)), d_m the block size.
  double c1_lhs = 0.0;
  // 1/d_m <= (1 - phi_m)/4 for every block.
  bool a2_ok = false;
  // every block size > 3.
  bool a2add_ok = false;
  // max consecutive block-size ratio minus 1 (0 for a single model).
  double zeta = 0.0;
  // max_m { 2 phi_m + 16/(d_m phi_m) }; +inf when some phi_m = 0.
  double phi_bar = 0.0;
};

AssumptionReport check_assumptions(const NestedModelSet& mset, const PenaltySchedule& phi);

}  // namespace nestedma

#endif
