#pragma once

#include <vector>

#include "beamalign/estimation.hpp"

namespace beamalign {

// Result of fitting a pair of constants to a two-term inequality over the
// whole candidate grid. `first`/`second` are the fitted coefficients
// (C1/C2 or C3/C4); when infeasible, worst_candidate points at the
// candidate that blocks every positive pair.
struct AssumptionFit {
  double first = 0.0;
  double second = 0.0;
  bool feasible = false;
  long worst_candidate = -1;
  double worst_lhs = 0.0;
  double worst_rhs = 0.0;
};

// Largest (C1, C2) on a log-spaced lattice with
//   C1*||theta*-theta||^2 + C2*||log beta*-log beta||^2
//     <= mean_a (R_a(truth) - R_a(cand))^2
// holding for every candidate. Truth must be on-grid; gains must be real
// positive so the log norm is defined.
AssumptionFit fit_assumption2(const ChannelParams& truth,
                              const ParameterGrid& grid,
                              const PatternMatrix& patterns);

// Smallest (C3, C4) with
//   |R_a(truth) - R_a(cand)| <= C3*||theta*-theta|| + C4*||log beta*-log beta||
// holding for every candidate and every beam. The inequality is an upper
// bound, so the lattice search minimizes instead of maximizing.
AssumptionFit fit_assumption3(const ChannelParams& truth,
                              const ParameterGrid& grid,
                              const PatternMatrix& patterns);

// The fixed lattice both fits search: {0} union quarter-decade powers of 10
// in [1e-6, 1e6].
std::vector<double> assumption_fit_lattice();

// ceil(T^(2/3) * (k * sigma^2 * (ln|B| + ln|Theta|))^(1/3)), clamped to
// [1, T]. Grid sizes are doubles so degenerate/synthetic sizes are testable.
long theoretical_m(long horizon, int num_paths, double sigma,
                   double num_gains, double num_angles);

// Monte-Carlo check of the data-norm concentration bounds: over `trials`
// datasets of m uniform pulls with Gaussian reward noise, the fraction of
// trials where, for every candidate,
//   0.5*||dR||^2 - bonus <= SSE(cand) - SSE(truth) <= 1.5*||dR||^2 + bonus
// with bonus = 4*k*sigma^2*ln(|B||Theta|/delta).
double concentration_check(const ChannelParams& truth,
                           const ParameterGrid& grid,
                           const PatternMatrix& patterns, long num_pulls,
                           double delta, double sigma, long trials, Rng& rng);

struct RewardBoundCheck {
  double max_abs_reward = 0.0;
  bool holds = false;
};

// Scans every candidate and beam for |reward| <= r_max (the boundedness
// assumption behind the regret analysis).
RewardBoundCheck check_reward_bound(const ParameterGrid& grid, int num_paths,
                                    const PatternMatrix& patterns,
                                    double r_max);

inline constexpr double kDefaultRewardBoundDbm = 70.0;

}  // namespace beamalign
