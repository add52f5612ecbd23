#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "beamalign/runner.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> horizon;
  std::optional<long> repetitions;
  std::optional<std::string> output;
  std::optional<std::string> policy;
  std::optional<long> explore_len;
  std::optional<long> tau;
  std::optional<std::string> trace_path;
  std::optional<long> factor;
};

void add_common(CLI::App* cmd, std::string* config_path, Overrides* ov) {
  cmd->add_option("-c,--config", *config_path, "run config file (key = value sections)")
      ->required();
  cmd->add_option("--seed", ov->seed, "override run.seed");
  cmd->add_option("--horizon", ov->horizon, "override run.horizon");
  cmd->add_option("--reps", ov->repetitions, "override run.repetitions");
  cmd->add_option("--output", ov->output, "override run.output");
  cmd->add_option("--policy", ov->policy, "override policy.name");
  cmd->add_option("--m", ov->explore_len, "override policy.m");
  cmd->add_option("--tau", ov->tau, "override policy.tau");
  cmd->add_option("--trace", ov->trace_path, "override environment.trace_path");
  cmd->add_option("--factor", ov->factor, "override environment.interp_factor");
}

beamalign::RunConfig load_with_overrides(const std::string& path,
                                         const Overrides& ov) {
  beamalign::ConfigFile file = beamalign::ConfigFile::parse_file(path);
  if (ov.seed) file.set("run.seed", std::to_string(*ov.seed));
  if (ov.horizon) file.set("run.horizon", std::to_string(*ov.horizon));
  if (ov.repetitions) file.set("run.repetitions", std::to_string(*ov.repetitions));
  if (ov.output) file.set("run.output", *ov.output);
  if (ov.policy) file.set("policy.name", *ov.policy);
  if (ov.explore_len) file.set("policy.m", std::to_string(*ov.explore_len));
  if (ov.tau) file.set("policy.tau", std::to_string(*ov.tau));
  if (ov.trace_path) {
    file.set("environment.trace_path", *ov.trace_path);
    file.set("environment.type", "trace");
  }
  if (ov.factor) file.set("environment.interp_factor", std::to_string(*ov.factor));
  return beamalign::run_config_from(file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric bandit simulator for beam alignment"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  add_common(run, &config_path, &ov);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "cartesian product over sweep.policies x seeds x horizons");
  add_common(sweep, &config_path, &ov);

  CLI::App* trace_run = app.add_subcommand(
      "trace-run", "run one experiment on a nonstationary trace environment");
  add_common(trace_run, &config_path, &ov);

  CLI::App* verify = app.add_subcommand(
      "verify-assumptions",
      "fit the reward-gap constants and check the concentration bound");
  add_common(verify, &config_path, &ov);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || trace_run->parsed()) {
      const beamalign::RunConfig config = load_with_overrides(config_path, ov);
      if (trace_run->parsed() && config.env_kind != beamalign::EnvKind::trace) {
        throw std::runtime_error(
            "trace-run: environment.type must be trace (or pass --trace)");
      }
      const beamalign::RunReport report = beamalign::run_experiment(config);
      std::cout << beamalign::format_run_report(report);
    } else if (sweep->parsed()) {
      const beamalign::RunConfig config = load_with_overrides(config_path, ov);
      const auto reports = beamalign::run_sweep(config);
      for (const auto& report : reports) {
        std::cout << beamalign::format_run_report(report);
      }
    } else if (verify->parsed()) {
      const beamalign::RunConfig config = load_with_overrides(config_path, ov);
      const beamalign::AssumptionReport report =
          beamalign::verify_assumptions(config);
      std::cout << beamalign::format_assumption_report(report);
      beamalign::write_assumption_csv(report, config.output_path);
      std::cout << "csv: " << config.output_path << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
