#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beamalign/environment.hpp"

namespace beamalign {

// Per-run regret series. Entry t (0-based) covers protocol step t+1.
// norm[t] is cumulative regret over the regret a uniform-random policy
// accrues in expectation up to that step; NaN where that denominator is
// degenerate (flat reward function).
struct RegretTrace {
  std::string policy;
  std::uint64_t seed = 0;
  std::string env_id;
  std::vector<int> beams;
  std::vector<double> rewards_dbm;  // observed rewards, filled by the runner
  std::vector<double> inst;
  std::vector<double> cum;
  std::vector<double> norm;
};

inline constexpr double kDegenerateDenominator = 1e-9;

RegretTrace regret_trace(const std::vector<int>& actions,
                         const Environment& env);

// Regret_T / (T * (max_a R - mean_a R)); stationary environments only.
double normalized_regret(const RegretTrace& trace, const Environment& env,
                         long horizon);

// DynamicRegret_T / sum_t (max_a R_t - mean_a R_t); coincides with
// normalized_regret on stationary environments.
double normalized_dynamic_regret(const RegretTrace& trace,
                                 const Environment& env, long horizon);

struct AggregateSummary {
  std::vector<double> mean;
  std::vector<double> stderr_mean;  // sample std / sqrt(n); 0 for n == 1
  double final_mean = 0.0;
  double final_stderr = 0.0;
};

// Per-step mean and standard error over repetitions of one series.
AggregateSummary aggregate(const std::vector<std::vector<double>>& series);

}  // namespace beamalign
