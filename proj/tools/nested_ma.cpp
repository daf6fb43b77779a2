#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nestedma/report.hpp"

namespace {

int write_output(const std::string& csv, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << csv;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return 3;
  }
  out << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested model-averaging estimators and risk simulations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  int threads = 1;

  CLI::App* simulate = app.add_subcommand("simulate", "Run the risk table experiment");
  simulate->add_option("config", config_path, "experiment config file")->required();
  simulate->add_option("--output,-o", output_override, "CSV output path ('-' = stdout)");
  simulate->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  CLI::App* figure = app.add_subcommand("figure", "Emit normalized-risk curves per n");
  figure->add_option("config", config_path, "experiment config file")->required();
  figure->add_option("--output,-o", output_override, "CSV output path ('-' = stdout)");
  figure->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  nestedma::CheckOptions check_options;
  std::string schedule_name = "geometric";
  std::string nu_name = "log";
  CLI::App* check = app.add_subcommand("check", "Inspect a candidate set and its assumptions");
  check->add_option("--n", check_options.n, "sample size")->required();
  check->add_option("--p", check_options.p_n, "regressor count (default: floor(4 n^(2/3)))");
  check->add_option("--schedule", schedule_name, "geometric|equal|two|full")
      ->check(CLI::IsMember({"geometric", "equal", "two", "full"}));
  check->add_option("--tau", check_options.tau, "penalty exponent in (0, 1/2); 0 = none");
  check->add_option("--nu", nu_name, "log|loglog")->check(CLI::IsMember({"log", "loglog"}));
  check->add_option("--block", check_options.block, "block size for the equal schedule");
  check->add_option("--signal", check_options.signal_path,
                    "basis coefficients of mu (p_n numbers) to evaluate risk bounds");
  check->add_option("--sigma2", check_options.sigma2, "noise variance for --signal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed() || figure->parsed()) {
      nestedma::ExperimentConfig config = nestedma::parse_config_file(config_path);
      if (!output_override.empty()) config.output = output_override;
      const std::string csv = simulate->parsed() ? nestedma::simulate_csv(config, threads)
                                                 : nestedma::figure_csv(config, threads);
      return write_output(csv, config.output);
    }
    if (check->parsed()) {
      if (schedule_name == "geometric") check_options.schedule = nestedma::SetKind::Geometric;
      else if (schedule_name == "equal") check_options.schedule = nestedma::SetKind::EqualBlocks;
      else if (schedule_name == "two") check_options.schedule = nestedma::SetKind::TwoModel;
      else check_options.schedule = nestedma::SetKind::Full;
      check_options.nu_mode =
          nu_name == "log" ? nestedma::NuMode::Log : nestedma::NuMode::LogLog;
      std::cout << nestedma::check_report_text(check_options);
      return 0;
    }
  } catch (const nestedma::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nestedma::InvalidParamsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
