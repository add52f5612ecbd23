#pragma once

#include <memory>
#include <string>
#include <vector>

#include "beamalign/analysis.hpp"
#include "beamalign/config.hpp"
#include "beamalign/environment.hpp"
#include "beamalign/metrics.hpp"
#include "beamalign/policies.hpp"

namespace beamalign {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

// Reads BEAMALIGN_LOG (quiet|info|debug) once; defaults to info.
LogLevel log_level();
void log_info(const std::string& message);
void log_debug(const std::string& message);
void log_warn(const std::string& message);

std::unique_ptr<Environment> build_environment(const RunConfig& config);
Codebook build_codebook(const RunConfig& config, int num_beams);

struct PolicySetup {
  std::string name;
  PolicyFactory factory;
};

// The policy a config describes, as a seedable factory. Parametric policies
// capture the estimation grids and the beam patterns on those grids.
PolicySetup make_policy_setup(const RunConfig& config, int num_beams,
                              std::vector<std::string>* warnings);

struct RunReport {
  std::vector<RegretTrace> traces;        // one per repetition
  AggregateSummary cum_regret_summary;
  double mean_step_seconds = 0.0;
  std::string csv_path;
  std::string policy_name;
  long horizon = 0;
  std::vector<std::string> warnings;
};

// Runs repetitions x horizon steps, writes the per-step CSV
// (rep,step,policy,beam,reward_dbm,inst_regret,cum_regret,norm_regret),
// and aggregates. Seeds derive from config.seed per repetition; output
// bytes depend only on (config, seed).
RunReport run_experiment(const RunConfig& config);

// Cartesian product over sweep.policies x sweep.seeds x sweep.horizons
// (falling back to the base config where a list is empty); one CSV per
// combination, suffixed `_<policy>_s<seed>_T<horizon>`.
std::vector<RunReport> run_sweep(const RunConfig& config);

struct AssumptionReport {
  AssumptionFit assumption2;
  AssumptionFit assumption3;
  RewardBoundCheck reward_bound;
  double r_max = 0.0;
  long theoretical_explore_len = 0;
  double concentration_coverage = -1.0;  // -1 when the check was skipped
  long trials = 0;
  double delta = 0.0;
};

AssumptionReport verify_assumptions(const RunConfig& config);
void write_assumption_csv(const AssumptionReport& report,
                          const std::string& path);
std::string format_assumption_report(const AssumptionReport& report);

std::string format_run_report(const RunReport& report);

}  // namespace beamalign
