#include "nestedma/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nestedma {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

long long parse_int(const std::string& value, const std::string& key) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (...) {
    throw ConfigError("config: key '" + key + "' has non-integer value '" + value + "'");
  }
  if (used != value.size())
    throw ConfigError("config: key '" + key + "' has non-integer value '" + value + "'");
  return v;
}

double parse_real(const std::string& value, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (...) {
    throw ConfigError("config: key '" + key + "' has non-numeric value '" + value + "'");
  }
  if (used != value.size())
    throw ConfigError("config: key '" + key + "' has non-numeric value '" + value + "'");
  return v;
}

std::string format_real(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

const char* mode_name(NormalizationMode mode) {
  return mode == NormalizationMode::Table ? "table" : "figure";
}

}  // namespace

EstimatorSpec parse_estimator_token(const std::string& token) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : token) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  const std::string& name = parts[0];

  EstimatorSpec spec;
  if (name == "MMA1") spec = EstimatorSpec::mma1();
  else if (name == "MMA2") spec = EstimatorSpec::mma2();
  else if (name == "MMA3") spec = EstimatorSpec::mma3();
  else if (name == "MMA4") spec = EstimatorSpec::mma4();
  else if (name == "SMA1") spec = EstimatorSpec::sma1();
  else if (name == "SMA2") spec = EstimatorSpec::sma2();
  else if (name == "SMA3") spec = EstimatorSpec::sma3();
  else if (name == "CUSTOM") spec.name = "CUSTOM";
  else throw ConfigError("config: unknown estimator '" + name + "'");

  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string& part = parts[i];
    const std::size_t eq = part.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: estimator option '" + part + "' is not key=value");
    const std::string key = part.substr(0, eq);
    const std::string value = part.substr(eq + 1);
    if (key == "tau") {
      spec.tau = parse_real(value, "estimators." + key);
      if (spec.tau < 0.0 || spec.tau >= 0.5)
        throw ConfigError("config: tau must lie in [0, 1/2); 0 disables the penalty");
    } else if (key == "nu") {
      if (value == "log") spec.nu_mode = NuMode::Log;
      else if (value == "loglog") spec.nu_mode = NuMode::LogLog;
      else throw ConfigError("config: nu must be 'log' or 'loglog'");
    } else if (key == "block") {
      const long long b = parse_int(value, "estimators." + key);
      if (b < 1) throw ConfigError("config: block must be >= 1");
      spec.block = static_cast<int>(b);
    } else if (key == "coef") {
      spec.penalty_coef = parse_real(value, "estimators." + key);
      if (!(spec.penalty_coef > 0.0)) throw ConfigError("config: coef must be positive");
      spec.log_n_penalty = false;
    } else if (key == "logn") {
      spec.log_n_penalty = value == "1" || value == "true";
    } else if (key == "set") {
      if (value == "full") spec.set_kind = SetKind::Full;
      else if (value == "geometric") spec.set_kind = SetKind::Geometric;
      else if (value == "equal") spec.set_kind = SetKind::EqualBlocks;
      else if (value == "two") spec.set_kind = SetKind::TwoModel;
      else throw ConfigError("config: set must be full|geometric|equal|two");
    } else if (key == "solver") {
      if (value == "simplex") spec.solver = SolverKind::MmaSimplex;
      else if (value == "stein") spec.solver = SolverKind::RelaxedStein;
      else throw ConfigError("config: solver must be simplex|stein");
    } else {
      throw ConfigError("config: unknown estimator option '" + key + "'");
    }
  }
  spec.name = token;
  return spec;
}

ExperimentConfig parse_config_text(const std::string& text) {
  static const std::set<std::string> known_keys = {
      "case", "alpha", "scenarios", "snr", "n", "replicates",
      "seed", "estimators", "mode", "output"};

  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (known_keys.find(key) == known_keys.end())
      throw ConfigError("config: unknown key '" + key + "'");
    if (kv.count(key)) throw ConfigError("config: duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError("config: key '" + key + "' has no value");
    kv[key] = value;
  }

  auto require = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("config: missing required key '" + key + "'");
    return it->second;
  };

  ExperimentConfig cfg;

  if (kv.count("scenarios")) {
    if (kv.count("case") || kv.count("alpha"))
      throw ConfigError("config: 'scenarios' excludes 'case' and 'alpha'");
    for (const std::string& tok : split_ws(kv["scenarios"])) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos)
        throw ConfigError("config: scenario '" + tok + "' is not case:alpha");
      const long long c = parse_int(tok.substr(0, colon), "scenarios");
      const double a = parse_real(tok.substr(colon + 1), "scenarios");
      cfg.scenarios.emplace_back(static_cast<int>(c), a);
    }
  } else {
    for (const std::string& ctok : split_ws(require("case"))) {
      const long long c = parse_int(ctok, "case");
      for (const std::string& atok : split_ws(require("alpha")))
        cfg.scenarios.emplace_back(static_cast<int>(c), parse_real(atok, "alpha"));
    }
  }
  if (cfg.scenarios.empty()) throw ConfigError("config: no scenarios given");
  for (const auto& [c, a] : cfg.scenarios) {
    if (c < 1 || c > 4) throw ConfigError("config: case must be 1..4");
    if (!(a > 0.0)) throw ConfigError("config: alpha must be positive");
  }

  cfg.snr = parse_real(require("snr"), "snr");
  if (!(cfg.snr > 0.0)) throw ConfigError("config: snr must be positive");

  for (const std::string& tok : split_ws(require("n"))) {
    const long long n = parse_int(tok, "n");
    if (n < 3) throw ConfigError("config: n values must be >= 3");
    cfg.n_values.push_back(static_cast<int>(n));
  }

  const long long reps = parse_int(require("replicates"), "replicates");
  if (reps < 2) throw ConfigError("config: replicates must be >= 2");
  cfg.replicates = static_cast<int>(reps);

  if (kv.count("seed")) {
    const std::string& value = kv["seed"];
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument("");
    } catch (...) {
      throw ConfigError("config: seed must be a non-negative integer");
    }
  }

  for (const std::string& tok : split_ws(require("estimators")))
    cfg.estimators.push_back(parse_estimator_token(tok));

  if (kv.count("mode")) {
    if (kv["mode"] == "table") cfg.mode = NormalizationMode::Table;
    else if (kv["mode"] == "figure") cfg.mode = NormalizationMode::Figure;
    else throw ConfigError("config: mode must be table|figure");
  }

  if (kv.count("output")) cfg.output = kv["output"];
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

SimulationConfig ExperimentConfig::to_simulation(std::size_t scenario_index, int threads) const {
  SimulationConfig sim;
  sim.n_values = n_values;
  sim.replicates = replicates;
  sim.seed = seed;
  sim.scenario.case_id = scenarios[scenario_index].first;
  sim.scenario.alpha = scenarios[scenario_index].second;
  sim.scenario.snr = snr;
  sim.estimators = estimators;
  sim.mode = mode;
  sim.threads = threads;
  return sim;
}

namespace {

std::string rows_to_csv(const std::vector<RiskRow>& rows, bool figure_layout) {
  std::string out;
  out += figure_layout
             ? "estimator,case,alpha,snr,n,p_n,norm_risk,se,replicates,seed\n"
             : "estimator,n,p_n,case,alpha,snr,mode,mean_loss,norm_risk,se,replicates,seed\n";
  for (const RiskRow& row : rows) {
    if (figure_layout) {
      out += row.estimator + ',' + std::to_string(row.case_id) + ',' +
             format_real(row.alpha) + ',' + format_real(row.snr) + ',' +
             std::to_string(row.n) + ',' + std::to_string(row.p_n) + ',' +
             format_real(row.norm_risk) + ',' + format_real(row.se) + ',' +
             std::to_string(row.replicates) + ',' + std::to_string(row.seed) + '\n';
    } else {
      out += row.estimator + ',' + std::to_string(row.n) + ',' + std::to_string(row.p_n) +
             ',' + std::to_string(row.case_id) + ',' + format_real(row.alpha) + ',' +
             format_real(row.snr) + ',' + mode_name(row.mode) + ',' +
             format_real(row.mean_loss) + ',' + format_real(row.norm_risk) + ',' +
             format_real(row.se) + ',' + std::to_string(row.replicates) + ',' +
             std::to_string(row.seed) + '\n';
    }
  }
  return out;
}

std::vector<RiskRow> run_experiment(const ExperimentConfig& config, int threads) {
  std::vector<RiskRow> rows;
  for (std::size_t i = 0; i < config.scenarios.size(); ++i) {
    const RiskReport report = monte_carlo(config.to_simulation(i, threads));
    rows.insert(rows.end(), report.rows.begin(), report.rows.end());
  }
  return rows;
}

}  // namespace

std::string simulate_csv(const ExperimentConfig& config, int threads) {
  return rows_to_csv(run_experiment(config, threads), false);
}

std::string figure_csv(const ExperimentConfig& config, int threads) {
  ExperimentConfig figure_config = config;
  figure_config.mode = NormalizationMode::Figure;
  return rows_to_csv(run_experiment(figure_config, threads), true);
}

std::string check_report_text(const CheckOptions& options) {
  if (options.n < 3) throw ConfigError("check: n must be >= 3");
  const int p = options.p_n > 0 ? options.p_n : p_rule(options.n);

  NestedModelSet mset = [&] {
    switch (options.schedule) {
      case SetKind::Full: return full_nested_set(p);
      case SetKind::Geometric:
        return geometric_set(ScheduleParams::create(nu_choice(options.n, options.nu_mode), p));
      case SetKind::EqualBlocks: return equal_block_set(p, options.block);
      case SetKind::TwoModel: return two_model_set(p);
    }
    throw ConfigError("check: unknown schedule");
  }();

  const PenaltySchedule phi =
      options.tau > 0.0 ? penalty_schedule(mset, options.tau) : zero_penalty(mset.count());
  const AssumptionReport report = check_assumptions(mset, phi);

  std::ostringstream out;
  out << "n = " << options.n << ", p_n = " << p << ", models = " << mset.count() << "\n";
  out << "candidate set:";
  for (int k : mset.sizes) out << ' ' << k;
  out << "\nblock sizes:  ";
  for (int m = 0; m < mset.count(); ++m) out << ' ' << mset.block_size(m);
  out << "\nphi:          ";
  for (double v : phi.phi) out << ' ' << format_real(v);
  out << "\n";
  out << "c1_lhs  = " << format_real(report.c1_lhs) << "\n";
  out << "zeta    = " << format_real(report.zeta) << "\n";
  out << "phi_bar = " << format_real(report.phi_bar) << "\n";
  out << "assumption block-probability sum finite (c1): "
      << (std::isfinite(report.c1_lhs) ? "PASS" : "FAIL") << "\n";
  out << "assumption 1/(k_m-k_{m-1}) <= (1-phi_m)/4:    "
      << (report.a2_ok ? "PASS" : "FAIL") << "\n";
  out << "assumption block sizes > 3:                   "
      << (report.a2add_ok ? "PASS" : "FAIL") << "\n";

  if (!options.signal_path.empty()) {
    std::ifstream in(options.signal_path);
    if (!in) throw ConfigError("check: cannot open signal file '" + options.signal_path + "'");
    std::vector<double> theta;
    double v;
    while (in >> v) theta.push_back(v);
    if (static_cast<int>(theta.size()) != p)
      throw ConfigError("check: signal file must hold exactly p_n coefficients");
    if (!(options.sigma2 > 0.0)) throw ConfigError("check: sigma2 must be positive");

    auto block_signal = [&](const NestedModelSet& set) {
      SignalDecomposition sig;
      sig.sizes = set;
      sig.sigma2 = options.sigma2;
      sig.mu_tail = 0.0;
      sig.mu_energy.assign(set.sizes.size(), 0.0);
      sig.block_noise.assign(set.sizes.size(), 0.0);
      int lo = 0;
      for (std::size_t m = 0; m < set.sizes.size(); ++m) {
        for (int j = lo; j < set.sizes[m]; ++j) sig.mu_energy[m] += theta[static_cast<std::size_t>(j)] * theta[static_cast<std::size_t>(j)];
        sig.block_noise[m] = (set.sizes[m] - lo) * options.sigma2;
        lo = set.sizes[m];
      }
      return sig;
    };

    const SignalDecomposition sig = block_signal(mset);
    const SignalDecomposition sig_all = block_signal(full_nested_set(p));
    out << "optimal relaxed risk: " << format_real(optimal_relaxed_risk(sig).risk) << "\n";
    out << "optimal simplex risk: " << format_real(optimal_simplex_risk(sig).risk) << "\n";
    out << "stein bound (unpenalized): "
        << format_real(stein_bound(sig, mset.count())) << "\n";
    if (std::isfinite(report.phi_bar)) {
      out << "stein bound (penalized):   " << format_real(penalized_stein_bound(sig, report))
          << "\n";
      out << "full-potential bound:      "
          << format_real(full_potential_bound(sig_all, report, mset.sizes.front())) << "\n";
    }
  }
  return out.str();
}

}  // namespace nestedma
