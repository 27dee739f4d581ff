#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spf/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Sensitivity-bounded statistics with optional personalized Laplace "
      "noising"};
  app.require_subcommand(1);

  spf::cli::RunConfig config;
  struct Sub {
    CLI::App* cmd;
    spf::cli::Statistic stat;
  };
  std::vector<Sub> subs;

  const auto add = [&](const std::string& name, spf::cli::Statistic stat,
                       const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("input", config.input_path,
                    "input CSV with header id,value")
        ->required();
    cmd->add_option("--delta", config.delta,
                    "uniform per-individual sensitivity budget");
    cmd->add_option("--delta-file", config.delta_file,
                    "CSV id,delta; a '*' row sets the default budget");
    cmd->add_option("--mu-hat", config.mu_hat,
                    "value of g at the empty database (mean convention)");
    cmd->add_option("--empty-value", config.empty_value,
                    "value of g at the empty database");
    cmd->add_option("--alpha", config.alpha,
                    "trimmed-mean fraction dropped per end, in [0, 0.5)");
    cmd->add_option("--epsilon-file", config.epsilon_file,
                    "CSV id,epsilon; enables Laplace noising");
    cmd->add_option("--seed", config.seed, "RNG seed for noising");
    cmd->add_flag("--json", config.json,
                  "emit one JSON object instead of a table");
    cmd->add_flag("--general", config.general,
                  "use the general subset recursion (heterogeneous budgets)");
    cmd->add_option("--max-n", config.max_n,
                    "database size cap for --general");
    subs.push_back({cmd, stat});
  };

  add("mean", spf::cli::Statistic::kMean, "arithmetic mean");
  add("trimmed-mean", spf::cli::Statistic::kTrimmedMean, "alpha-trimmed mean");
  add("median", spf::cli::Statistic::kMedian, "median");
  add("min", spf::cli::Statistic::kMin, "minimum");
  add("max", spf::cli::Statistic::kMax, "maximum");
  add("variance", spf::cli::Statistic::kVariance, "population variance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : spf::cli::kExitInvalidParameters;
  }

  for (const Sub& s : subs) {
    if (s.cmd->parsed()) {
      config.statistic = s.stat;
      break;
    }
  }
  return spf::cli::run(config, std::cout, std::cerr);
}
