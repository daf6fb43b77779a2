#ifndef NESTEDMA_REPORT_HPP
#define NESTEDMA_REPORT_HPP

#include <string>
#include <utility>
#include <vector>

#include "nestedma/simulate.hpp"

namespace nestedma {

/// Parsed experiment file: one or more (case, alpha) scenarios sharing the
/// remaining settings. Unknown keys are errors.
struct ExperimentConfig {
  std::vector<std::pair<int, double>> scenarios;  // (case_id, alpha)
  double snr = 1.0;
  std::vector<int> n_values;
  int replicates = 0;
  std::uint64_t seed = 1;
  std::vector<EstimatorSpec> estimators;
  NormalizationMode mode = NormalizationMode::Table;
  std::string output;  // empty = stdout

  SimulationConfig to_simulation(std::size_t scenario_index, int threads) const;
};

/// Grammar: `key = value` lines, `#` comments, blank lines ignored.
/// List values are whitespace-separated. Throws ConfigError on unknown keys,
/// malformed values, or out-of-range settings.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Estimator token grammar: NAME[:key=value...], e.g. "SMA1:tau=0.25" or
/// "CUSTOM:set=equal:block=8:solver=simplex".
EstimatorSpec parse_estimator_token(const std::string& token);

/// CSV with header estimator,n,p_n,case,alpha,snr,mode,mean_loss,norm_risk,
/// se,replicates,seed; one row per (scenario, n, estimator), LF newlines,
/// C-locale numbers.
std::string simulate_csv(const ExperimentConfig& config, int threads);

/// Long-format series CSV for plotting: forces figure normalization, header
/// estimator,case,alpha,snr,n,p_n,norm_risk,se,replicates,seed.
std::string figure_csv(const ExperimentConfig& config, int threads);

struct CheckOptions {
  int n = 0;
  int p_n = -1;  // -1: use p_rule(n)
  SetKind schedule = SetKind::Geometric;
  double tau = 1.0 / 3.0;  // 0 = no penalty
  NuMode nu_mode = NuMode::Log;
  int block = 4;
  std::string signal_path;  // optional: basis coefficients of mu, one per line
  double sigma2 = 1.0;      // used with signal_path
};

/// Human-readable candidate-set and assumption report; with a signal file it
/// also evaluates the oracle risks and risk bounds.
std::string check_report_text(const CheckOptions& options);

}  // namespace nestedma

#endif
