#include "nestedma/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace nestedma {

EstimatorSpec EstimatorSpec::mma1() {
  EstimatorSpec s;
  s.name = "MMA1";
  s.set_kind = SetKind::Full;
  s.solver = SolverKind::MmaSimplex;
  return s;
}

EstimatorSpec EstimatorSpec::mma2() {
  EstimatorSpec s = mma1();
  s.name = "MMA2";
  s.log_n_penalty = true;
  return s;
}

EstimatorSpec EstimatorSpec::mma3() {
  EstimatorSpec s;
  s.name = "MMA3";
  s.set_kind = SetKind::Geometric;
  s.nu_mode = NuMode::Log;
  s.solver = SolverKind::MmaSimplex;
  return s;
}

EstimatorSpec EstimatorSpec::mma4(int block) {
  EstimatorSpec s;
  s.name = "MMA4";
  s.set_kind = SetKind::EqualBlocks;
  s.block = block;
  s.solver = SolverKind::MmaSimplex;
  return s;
}

EstimatorSpec EstimatorSpec::sma1(double tau) {
  EstimatorSpec s;
  s.name = "SMA1";
  s.set_kind = SetKind::Geometric;
  s.nu_mode = NuMode::Log;
  s.solver = SolverKind::RelaxedStein;
  s.tau = tau;
  return s;
}

EstimatorSpec EstimatorSpec::sma2(double tau) {
  EstimatorSpec s = sma1(tau);
  s.name = "SMA2";
  s.nu_mode = NuMode::LogLog;
  return s;
}

EstimatorSpec EstimatorSpec::sma3() {
  EstimatorSpec s;
  s.name = "SMA3";
  s.set_kind = SetKind::TwoModel;
  s.solver = SolverKind::RelaxedStein;
  s.tau = 0.0;
  return s;
}

NestedModelSet EstimatorSpec::build_set(int n, int p_n) const {
  switch (set_kind) {
    case SetKind::Full:
      return full_nested_set(p_n);
    case SetKind::Geometric:
      return geometric_set(ScheduleParams::create(nu_choice(n, nu_mode), p_n));
    case SetKind::EqualBlocks:
      return equal_block_set(p_n, block);
    case SetKind::TwoModel:
      return two_model_set(p_n);
  }
  throw InvalidParamsError("unknown set kind");
}

int p_rule(int n) {
  if (n < 1) throw InvalidParamsError("n must be >= 1");
  const double root = std::cbrt(static_cast<double>(n));
  const int raw = static_cast<int>(std::floor(4.0 * root * root + 1e-9));
  return std::min(n, raw);
}

DesignMatrix generate_design(int n, int p_n, RngStream& stream) {
  if (n < 1 || p_n < 1 || p_n > n) throw InvalidParamsError("invalid design dimensions");
  DesignMatrix x;
  x.values.resize(n, p_n);
  x.values.col(0).setOnes();
  for (int j = 1; j < p_n; ++j) {
    for (int i = 0; i < n; ++i) x.values(i, j) = stream.next_normal();
  }
  return x;
}

Eigen::VectorXd beta_for_case(const CaseSpec& scenario, int p_n) {
  if (p_n < 1) throw InvalidParamsError("p_n must be >= 1");
  if (!(scenario.alpha > 0.0)) throw InvalidParamsError("alpha must be positive");
  Eigen::VectorXd beta(p_n);
  for (int j = 1; j <= p_n; ++j) {
    const double front = static_cast<double>(j);
    const double back = static_cast<double>(p_n + 1 - j);
    double value = 0.0;
    switch (scenario.case_id) {
      case 1: value = std::pow(front, -scenario.alpha); break;
      case 2: value = std::exp(-std::pow(front, scenario.alpha)); break;
      case 3: value = std::pow(back, -scenario.alpha); break;
      case 4: value = std::exp(-std::pow(back, scenario.alpha)); break;
      default: throw InvalidParamsError("case_id must be 1..4");
    }
    beta[j - 1] = value;
  }
  return beta;
}

double calibrate_sigma2(const Eigen::VectorXd& beta, double snr) {
  if (!(snr > 0.0)) throw InvalidParamsError("snr must be positive");
  if (beta.size() < 2) throw InvalidParamsError("beta must include the intercept and slopes");
  const double signal = beta.tail(beta.size() - 1).squaredNorm();
  if (signal <= 0.0) throw ZeroSignalError("non-intercept coefficients are all zero");
  return signal / snr;
}

double oracle_simplex_loss(const std::vector<double>& s, const std::vector<double>& c,
                           const std::vector<double>& e, double tail) {
  // ||mu_m - g y_m||^2 = s_m g^2 - 2 c_m g + e_m, separable across blocks.
  std::vector<double> targets(s.size());
  for (std::size_t m = 0; m < s.size(); ++m) targets[m] = s[m] > 0.0 ? c[m] / s[m] : 0.0;
  const std::vector<double> gamma = pava_antitonic(targets, s, 0.0, 1.0, 1.0);
  double loss = tail;
  for (std::size_t m = 0; m < s.size(); ++m)
    loss += gamma[m] * (gamma[m] * s[m] - 2.0 * c[m]) + e[m];
  return loss;
}

namespace {

struct BlockStats {
  std::vector<double> s;  // response energy per block
  std::vector<double> c;  // <y_m, mu_m> per block
  std::vector<double> e;  // signal energy per block
};

BlockStats group_stats(const Eigen::VectorXd& zy, const Eigen::VectorXd& zmu,
                       const NestedModelSet& mset) {
  BlockStats st;
  st.s.resize(mset.sizes.size(), 0.0);
  st.c.resize(mset.sizes.size(), 0.0);
  st.e.resize(mset.sizes.size(), 0.0);
  int lo = 0;
  for (std::size_t m = 0; m < mset.sizes.size(); ++m) {
    const int hi = mset.sizes[m];
    for (int j = lo; j < hi; ++j) {
      st.s[m] += zy[j] * zy[j];
      st.c[m] += zy[j] * zmu[j];
      st.e[m] += zmu[j] * zmu[j];
    }
    lo = hi;
  }
  return st;
}

double loss_for_gamma(const BlockStats& st, const std::vector<double>& gamma, double tail) {
  double loss = tail;
  for (std::size_t m = 0; m < gamma.size(); ++m)
    loss += gamma[m] * (gamma[m] * st.s[m] - 2.0 * st.c[m]) + st.e[m];
  return std::max(0.0, loss);
}

}  // namespace

ReplicateResult run_replicate(const SimulationConfig& config, int n, int replicate_index) {
  const int p = p_rule(n);
  const Eigen::VectorXd beta = beta_for_case(config.scenario, p);
  const double sigma2 = calibrate_sigma2(beta, config.scenario.snr);
  const double sigma = std::sqrt(sigma2);

  OrthoBasis basis;
  Eigen::VectorXd mu, y;
  bool factored = false;
  for (std::uint32_t attempt = 0; attempt < 4 && !factored; ++attempt) {
    RngStream design_stream(config.seed, static_cast<std::uint32_t>(n),
                            static_cast<std::uint32_t>(replicate_index),
                            kPurposeDesign + attempt * kPurposeAttemptStride);
    const DesignMatrix x = generate_design(n, p, design_stream);
    RngStream noise_stream(config.seed, static_cast<std::uint32_t>(n),
                           static_cast<std::uint32_t>(replicate_index),
                           kPurposeNoise + attempt * kPurposeAttemptStride);
    mu = x.values * beta;
    y = mu;
    for (int i = 0; i < n; ++i) y[i] += sigma * noise_stream.next_normal();
    try {
      basis = orthogonalize(x);
      factored = true;
    } catch (const RankDeficientError&) {
      if (attempt == 3) throw;
    }
  }

  const Eigen::VectorXd zy = basis.q.transpose() * y;
  const Eigen::VectorXd zmu = basis.q.transpose() * mu;
  const double mu_tail = std::max(0.0, mu.squaredNorm() - zmu.squaredNorm());
  const double y_resid = std::max(0.0, y.squaredNorm() - zy.squaredNorm());

  ReplicateResult result;
  result.mu_tail = mu_tail;
  result.y_energy.resize(static_cast<std::size_t>(p));
  result.cross.resize(static_cast<std::size_t>(p));
  result.mu_energy.resize(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    result.y_energy[static_cast<std::size_t>(j)] = zy[j] * zy[j];
    result.cross[static_cast<std::size_t>(j)] = zy[j] * zmu[j];
    result.mu_energy[static_cast<std::size_t>(j)] = zmu[j] * zmu[j];
  }
  result.oracle_loss_full =
      oracle_simplex_loss(result.y_energy, result.cross, result.mu_energy, mu_tail);

  const NestedModelSet geometric =
      geometric_set(ScheduleParams::create(nu_choice(n, NuMode::Log), p));
  {
    const BlockStats st = group_stats(zy, zmu, geometric);
    result.oracle_loss_geometric = oracle_simplex_loss(st.s, st.c, st.e, mu_tail);
  }

  result.estimator_losses.reserve(config.estimators.size());
  for (const EstimatorSpec& spec : config.estimators) {
    const NestedModelSet mset = spec.build_set(n, p);
    const BlockStats st = group_stats(zy, zmu, mset);

    BlockDecomposition decomp;
    decomp.block_energy = st.s;
    decomp.block_noise.resize(mset.sizes.size());
    for (int m = 0; m < mset.count(); ++m)
      decomp.block_noise[static_cast<std::size_t>(m)] = mset.block_size(m) * sigma2;
    decomp.residual_energy = y_resid;
    decomp.sigma2 = sigma2;

    CumulativeWeights gamma;
    if (spec.solver == SolverKind::MmaSimplex) {
      const double coef =
          spec.log_n_penalty ? std::log(static_cast<double>(n)) : spec.penalty_coef;
      gamma = solve_mma_simplex(decomp, coef);
    } else {
      const PenaltySchedule phi =
          spec.tau > 0.0 ? penalty_schedule(mset, spec.tau) : zero_penalty(mset.count());
      gamma = solve_relaxed(decomp, phi);
    }
    result.estimator_losses.push_back(loss_for_gamma(st, gamma.gamma, mu_tail));
  }
  return result;
}

namespace {

std::vector<ReplicateResult> run_all_replicates(const SimulationConfig& config, int n) {
  std::vector<ReplicateResult> results(static_cast<std::size_t>(config.replicates));
  const int threads = std::max(1, config.threads);
  if (threads == 1) {
    for (int r = 0; r < config.replicates; ++r)
      results[static_cast<std::size_t>(r)] = run_replicate(config, n, r);
    return results;
  }

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= config.replicates) return;
      try {
        results[static_cast<std::size_t>(r)] = run_replicate(config, n, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double se_of(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (static_cast<double>(values.size()) - 1.0) /
                   static_cast<double>(values.size()));
}

// Loss of the single weight vector minimizing the replicate-averaged loss on
// the all-models set, divided by the replicate count.
double shared_weight_denominator(const std::vector<ReplicateResult>& results) {
  const std::size_t p = results.front().y_energy.size();
  std::vector<double> s(p, 0.0), c(p, 0.0), e(p, 0.0);
  double tail = 0.0;
  for (const ReplicateResult& r : results) {
    for (std::size_t j = 0; j < p; ++j) {
      s[j] += r.y_energy[j];
      c[j] += r.cross[j];
      e[j] += r.mu_energy[j];
    }
    tail += r.mu_tail;
  }
  return oracle_simplex_loss(s, c, e, tail) / static_cast<double>(results.size());
}

}  // namespace

RiskReport monte_carlo(const SimulationConfig& config) {
  if (config.replicates < 2) throw InvalidParamsError("at least two replicates required");
  if (config.estimators.empty()) throw InvalidParamsError("no estimators configured");

  RiskReport report;
  for (int n : config.n_values) {
    const std::vector<ReplicateResult> results = run_all_replicates(config, n);
    const double figure_denom = config.mode == NormalizationMode::Figure
                                    ? shared_weight_denominator(results)
                                    : 0.0;

    for (std::size_t est = 0; est < config.estimators.size(); ++est) {
      std::vector<double> losses(results.size());
      for (std::size_t r = 0; r < results.size(); ++r)
        losses[r] = results[r].estimator_losses[est];
      const double mean_loss = mean_of(losses);

      RiskRow row;
      row.estimator = config.estimators[est].name;
      row.n = n;
      row.p_n = p_rule(n);
      row.case_id = config.scenario.case_id;
      row.alpha = config.scenario.alpha;
      row.snr = config.scenario.snr;
      row.mode = config.mode;
      row.mean_loss = mean_loss;
      row.replicates = config.replicates;
      row.seed = config.seed;
      if (config.mode == NormalizationMode::Table) {
        std::vector<double> ratios(results.size());
        for (std::size_t r = 0; r < results.size(); ++r)
          ratios[r] = losses[r] / results[r].oracle_loss_geometric;
        row.norm_risk = mean_of(ratios);
        row.se = se_of(ratios, row.norm_risk);
      } else {
        row.norm_risk = mean_loss / figure_denom;
        row.se = se_of(losses, mean_loss) / figure_denom;
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace nestedma
