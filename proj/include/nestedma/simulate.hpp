#ifndef NESTEDMA_SIMULATE_HPP
#define NESTEDMA_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nestedma/candidates.hpp"
#include "nestedma/oracle.hpp"
#include "nestedma/rng.hpp"
#include "nestedma/spectral.hpp"
#include "nestedma/weights.hpp"

namespace nestedma {

/// Coefficient-decay scenario. Cases 1-2 decay from the front
/// (j^-alpha, exp(-j^alpha)); cases 3-4 mirror them so coefficients grow.
struct CaseSpec {
  int case_id = 1;      // 1..4
  double alpha = 1.0;   // > 0
  double snr = 1.0;     // population signal-to-noise ratio, > 0
};

enum class SetKind { Full, Geometric, EqualBlocks, TwoModel };
enum class SolverKind { MmaSimplex, RelaxedStein };

/// One weighting method: a candidate-set builder plus a weight solver.
/// tau = 0 with RelaxedStein means the unpenalized rule (phi = 0).
struct EstimatorSpec {
  std::string name;
  SetKind set_kind = SetKind::Full;
  SolverKind solver = SolverKind::MmaSimplex;
  NuMode nu_mode = NuMode::Log;  // Geometric sets only
  int block = 4;                 // EqualBlocks only
  double penalty_coef = 2.0;     // MmaSimplex only
  bool log_n_penalty = false;    // MmaSimplex: replace the coefficient by log n
  double tau = 1.0 / 3.0;        // RelaxedStein penalty exponent; 0 = no penalty

  static EstimatorSpec mma1();
  static EstimatorSpec mma2();
  static EstimatorSpec mma3();
  static EstimatorSpec mma4(int block = 4);
  static EstimatorSpec sma1(double tau = 1.0 / 3.0);
  static EstimatorSpec sma2(double tau = 1.0 / 3.0);
  static EstimatorSpec sma3();

  NestedModelSet build_set(int n, int p_n) const;
};

enum class NormalizationMode { Table, Figure };

struct SimulationConfig {
  std::vector<int> n_values;
  int replicates = 100;
  std::uint64_t seed = 1;
  CaseSpec scenario;
  std::vector<EstimatorSpec> estimators;
  NormalizationMode mode = NormalizationMode::Table;
  int threads = 1;
};

/// Ambient regressor count floor(4 n^(2/3)), capped at n so the design can
/// keep full column rank on the smallest sample sizes.
int p_rule(int n);

/// Intercept column of ones plus p_n - 1 columns of i.i.d. standard normals,
/// drawn column by column. Same stream state gives a bit-identical matrix.
DesignMatrix generate_design(int n, int p_n, RngStream& stream);

/// Coefficient vector of the scenario's decay law.
Eigen::VectorXd beta_for_case(const CaseSpec& scenario, int p_n);

/// sigma^2 = ||beta_{-1}||^2 / snr (identity regressor covariance; the
/// intercept coefficient is excluded).
double calibrate_sigma2(const Eigen::VectorXd& beta, double snr);

/// Everything one replicate contributes to the aggregation: estimator
/// losses, the per-replicate oracle losses on the all-models set and on the
/// geometric set, and the per-coordinate all-models statistics used by the
/// shared-weight oracle of the figure normalization.
struct ReplicateResult {
  std::vector<double> estimator_losses;  // ||mu_hat - mu||^2 per estimator
  double oracle_loss_full = 0.0;         // min over monotone gammas, all models
  double oracle_loss_geometric = 0.0;    // same on the geometric (log-nu) set
  std::vector<double> y_energy;          // z_y^2 per coordinate
  std::vector<double> cross;             // z_y * z_mu per coordinate
  std::vector<double> mu_energy;         // z_mu^2 per coordinate
  double mu_tail = 0.0;
};

/// Draws fresh design and noise keyed by (seed, n, replicate_index), runs the
/// whole estimator catalog on one factorization, and evaluates all losses in
/// coefficient space. A rank-deficient draw is retried on the next sub-stream
/// (at most 3 retries) before RankDeficientError propagates.
ReplicateResult run_replicate(const SimulationConfig& config, int n, int replicate_index);

/// Minimal realized loss over monotone cumulative weights, from per-block
/// response energies s, signal-response cross terms c, signal energies e and
/// the out-of-span signal energy. Solved exactly by PAVA on the separable
/// quadratic. Shared by the per-replicate and the shared-weight oracles.
double oracle_simplex_loss(const std::vector<double>& s, const std::vector<double>& c,
                           const std::vector<double>& e, double tail);

struct RiskRow {
  std::string estimator;
  int n = 0;
  int p_n = 0;
  int case_id = 0;
  double alpha = 0.0;
  double snr = 0.0;
  NormalizationMode mode = NormalizationMode::Table;
  double mean_loss = 0.0;
  double norm_risk = 0.0;
  double se = 0.0;
  int replicates = 0;
  std::uint64_t seed = 0;
};

struct RiskReport {
  std::vector<RiskRow> rows;
};

/// Runs all replicates for every n (optionally across threads; results are
/// independent of scheduling) and aggregates in replicate order.
/// Table mode: mean and standard error of per-replicate ratios against the
/// geometric-set oracle loss. Figure mode: mean loss over the loss of one
/// shared weight vector fitted to the replicate-averaged all-models
/// statistics.
RiskReport monte_carlo(const SimulationConfig& config);

}  // namespace nestedma

#endif
