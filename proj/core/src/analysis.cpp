#include "beamalign/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace beamalign {

namespace {

void require_real_positive_gains(const ChannelParams& truth,
                                 const ParameterGrid& grid) {
  for (const cplx& g : grid.gains) {
    if (g.imag() != 0.0 || !(g.real() > 0.0)) {
      throw std::invalid_argument(
          "assumption fit: gains must be real positive for the log norm");
    }
  }
  for (const cplx& b : truth.betas()) {
    if (b.imag() != 0.0 || !(b.real() > 0.0)) {
      throw std::invalid_argument(
          "assumption fit: gains must be real positive for the log norm");
    }
  }
}

// Per-candidate pieces shared by both fits.
struct GapTable {
  long truth_index = -1;
  std::vector<double> theta_norm_sq;
  std::vector<double> log_gain_norm_sq;
  std::vector<double> mean_sq_gap;  // mean over beams of squared reward gap
  std::vector<double> max_abs_gap;  // max over beams of absolute reward gap
};

GapTable build_gap_table(const ChannelParams& truth, const CandidateSpace& space,
                         const PatternMatrix& patterns) {
  GapTable table;
  table.truth_index = space.index_of(truth);
  if (table.truth_index < 0) {
    throw std::invalid_argument(
        "assumption fit: truth parameters are off-grid");
  }
  const int k = space.num_paths();
  const int num_beams = patterns.num_beams;
  const long n = space.num_candidates();
  table.theta_norm_sq.resize(static_cast<std::size_t>(n));
  table.log_gain_norm_sq.resize(static_cast<std::size_t>(n));
  table.mean_sq_gap.resize(static_cast<std::size_t>(n));
  table.max_abs_gap.resize(static_cast<std::size_t>(n));

  std::vector<double> truth_rewards(static_cast<std::size_t>(num_beams));
  for (int a = 0; a < num_beams; ++a) {
    truth_rewards[static_cast<std::size_t>(a)] =
        space.predicted_reward(table.truth_index, a, patterns);
  }
  std::vector<double> log_gains(space.grid().num_gains());
  for (std::size_t j = 0; j < log_gains.size(); ++j) {
    log_gains[j] = std::log(space.grid().gains[j].real());
  }
  std::vector<double> truth_log_beta(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    truth_log_beta[static_cast<std::size_t>(i)] =
        std::log(truth.betas()[static_cast<std::size_t>(i)].real());
  }

  std::vector<int> ti(static_cast<std::size_t>(k));
  std::vector<int> gi(static_cast<std::size_t>(k));
  for (long c = 0; c < n; ++c) {
    space.decode(c, ti.data(), gi.data());
    double tn = 0.0;
    double gn = 0.0;
    for (int i = 0; i < k; ++i) {
      const double dt = truth.thetas_rad()[static_cast<std::size_t>(i)] -
                        space.grid().thetas_rad[static_cast<std::size_t>(ti[i])];
      tn += dt * dt;
      const double dg = truth_log_beta[static_cast<std::size_t>(i)] -
                        log_gains[static_cast<std::size_t>(gi[i])];
      gn += dg * dg;
    }
    double sq_sum = 0.0;
    double abs_max = 0.0;
    for (int a = 0; a < num_beams; ++a) {
      const double gap = truth_rewards[static_cast<std::size_t>(a)] -
                         space.predicted_reward(c, a, patterns);
      sq_sum += gap * gap;
      abs_max = std::max(abs_max, std::fabs(gap));
    }
    table.theta_norm_sq[static_cast<std::size_t>(c)] = tn;
    table.log_gain_norm_sq[static_cast<std::size_t>(c)] = gn;
    table.mean_sq_gap[static_cast<std::size_t>(c)] =
        sq_sum / static_cast<double>(num_beams);
    table.max_abs_gap[static_cast<std::size_t>(c)] = abs_max;
  }
  return table;
}

}  // namespace

std::vector<double> assumption_fit_lattice() {
  std::vector<double> lattice;
  lattice.push_back(0.0);
  for (int p = -24; p <= 24; ++p) {
    lattice.push_back(std::pow(10.0, static_cast<double>(p) / 4.0));
  }
  return lattice;
}

AssumptionFit fit_assumption2(const ChannelParams& truth,
                              const ParameterGrid& grid,
                              const PatternMatrix& patterns) {
  require_real_positive_gains(truth, grid);
  CandidateSpace space(grid, truth.num_paths());
  const GapTable table = build_gap_table(truth, space, patterns);
  const long n = space.num_candidates();
  const std::vector<double> lattice = assumption_fit_lattice();

  AssumptionFit fit;
  double best_sum = 0.0;
  for (double c1 : lattice) {
    for (double c2 : lattice) {
      if (c1 + c2 <= best_sum) continue;
      bool ok = true;
      for (long c = 0; c < n; ++c) {
        const double lhs = c1 * table.theta_norm_sq[static_cast<std::size_t>(c)] +
                           c2 * table.log_gain_norm_sq[static_cast<std::size_t>(c)];
        if (lhs > table.mean_sq_gap[static_cast<std::size_t>(c)]) {
          ok = false;
          break;
        }
      }
      if (ok && c1 + c2 > best_sum) {
        best_sum = c1 + c2;
        fit.first = c1;
        fit.second = c2;
      }
    }
  }
  fit.feasible = best_sum > 0.0;
  if (!fit.feasible) {
    // Record the binding candidate: a parameter change the reward gap
    // cannot see.
    double worst = std::numeric_limits<double>::infinity();
    for (long c = 0; c < n; ++c) {
      const double dist = table.theta_norm_sq[static_cast<std::size_t>(c)] +
                          table.log_gain_norm_sq[static_cast<std::size_t>(c)];
      if (dist > 0.0 && table.mean_sq_gap[static_cast<std::size_t>(c)] < worst) {
        worst = table.mean_sq_gap[static_cast<std::size_t>(c)];
        fit.worst_candidate = c;
        fit.worst_lhs = dist;
        fit.worst_rhs = table.mean_sq_gap[static_cast<std::size_t>(c)];
      }
    }
  }
  return fit;
}

AssumptionFit fit_assumption3(const ChannelParams& truth,
                              const ParameterGrid& grid,
                              const PatternMatrix& patterns) {
  require_real_positive_gains(truth, grid);
  CandidateSpace space(grid, truth.num_paths());
  const GapTable table = build_gap_table(truth, space, patterns);
  const long n = space.num_candidates();
  const std::vector<double> lattice = assumption_fit_lattice();

  std::vector<double> theta_norm(static_cast<std::size_t>(n));
  std::vector<double> gain_norm(static_cast<std::size_t>(n));
  for (long c = 0; c < n; ++c) {
    theta_norm[static_cast<std::size_t>(c)] =
        std::sqrt(table.theta_norm_sq[static_cast<std::size_t>(c)]);
    gain_norm[static_cast<std::size_t>(c)] =
        std::sqrt(table.log_gain_norm_sq[static_cast<std::size_t>(c)]);
  }

  AssumptionFit fit;
  double best_sum = std::numeric_limits<double>::infinity();
  for (double c3 : lattice) {
    for (double c4 : lattice) {
      if (c3 + c4 >= best_sum) continue;
      bool ok = true;
      for (long c = 0; c < n; ++c) {
        const double rhs = c3 * theta_norm[static_cast<std::size_t>(c)] +
                           c4 * gain_norm[static_cast<std::size_t>(c)];
        if (table.max_abs_gap[static_cast<std::size_t>(c)] > rhs) {
          ok = false;
          break;
        }
      }
      if (ok) {
        best_sum = c3 + c4;
        fit.first = c3;
        fit.second = c4;
        fit.feasible = true;
      }
    }
  }
  if (!fit.feasible) {
    const double cmax = lattice.back();
    double worst = -std::numeric_limits<double>::infinity();
    for (long c = 0; c < n; ++c) {
      const double slack = table.max_abs_gap[static_cast<std::size_t>(c)] -
                           cmax * (theta_norm[static_cast<std::size_t>(c)] +
                                   gain_norm[static_cast<std::size_t>(c)]);
      if (slack > worst) {
        worst = slack;
        fit.worst_candidate = c;
        fit.worst_lhs = table.max_abs_gap[static_cast<std::size_t>(c)];
        fit.worst_rhs = cmax * (theta_norm[static_cast<std::size_t>(c)] +
                                gain_norm[static_cast<std::size_t>(c)]);
      }
    }
  }
  return fit;
}

long theoretical_m(long horizon, int num_paths, double sigma, double num_gains,
                   double num_angles) {
  if (horizon < 1) {
    throw std::invalid_argument("theoretical_m: horizon must be >= 1");
  }
  if (num_paths < 1) {
    throw std::invalid_argument("theoretical_m: num_paths must be >= 1");
  }
  if (!(sigma >= 0.0) || !(num_gains >= 1.0) || !(num_angles >= 1.0)) {
    throw std::invalid_argument("theoretical_m: bad sigma or grid sizes");
  }
  const double arg = static_cast<double>(num_paths) * sigma * sigma *
                     (std::log(num_gains) + std::log(num_angles));
  const double raw =
      std::pow(static_cast<double>(horizon), 2.0 / 3.0) * std::cbrt(arg);
  double m = std::ceil(raw);
  if (!(m >= 1.0)) m = 1.0;
  if (m > static_cast<double>(horizon)) m = static_cast<double>(horizon);
  return static_cast<long>(m);
}

double concentration_check(const ChannelParams& truth,
                           const ParameterGrid& grid,
                           const PatternMatrix& patterns, long num_pulls,
                           double delta, double sigma, long trials, Rng& rng) {
  if (trials < 1) {
    throw std::invalid_argument("concentration_check: trials must be >= 1");
  }
  if (num_pulls < 1) {
    throw std::invalid_argument("concentration_check: num_pulls must be >= 1");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("concentration_check: delta must be in (0,1)");
  }
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("concentration_check: sigma must be >= 0");
  }
  CandidateSpace space(grid, truth.num_paths());
  const long truth_index = space.index_of(truth);
  if (truth_index < 0) {
    throw std::invalid_argument(
        "concentration_check: truth parameters are off-grid");
  }
  const int num_beams = patterns.num_beams;
  const long n = space.num_candidates();
  // Dense candidate-by-beam prediction table; this check is for desk-scale
  // grids where an exhaustive loop is cheap.
  std::vector<double> pred(static_cast<std::size_t>(n) *
                           static_cast<std::size_t>(num_beams));
  for (long c = 0; c < n; ++c) {
    for (int a = 0; a < num_beams; ++a) {
      pred[static_cast<std::size_t>(c) * static_cast<std::size_t>(num_beams) +
           static_cast<std::size_t>(a)] = space.predicted_reward(c, a, patterns);
    }
  }
  const double* truth_pred =
      pred.data() +
      static_cast<std::size_t>(truth_index) * static_cast<std::size_t>(num_beams);

  const double bonus =
      4.0 * static_cast<double>(truth.num_paths()) * sigma * sigma *
      std::log(static_cast<double>(space.grid().num_gains()) *
               static_cast<double>(space.grid().num_angles()) / delta);
  const double eps = 1e-9;

  std::uniform_int_distribution<int> beam_dist(0, num_beams - 1);
  std::vector<int> pulls(static_cast<std::size_t>(num_pulls));
  std::vector<double> rewards(static_cast<std::size_t>(num_pulls));

  long held = 0;
  for (long trial = 0; trial < trials; ++trial) {
    for (long t = 0; t < num_pulls; ++t) {
      const int a = beam_dist(rng);
      pulls[static_cast<std::size_t>(t)] = a;
      double r = truth_pred[a];
      if (sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, sigma);
        r += noise(rng);
      }
      rewards[static_cast<std::size_t>(t)] = r;
    }
    double sse_truth = 0.0;
    for (long t = 0; t < num_pulls; ++t) {
      const double d =
          truth_pred[pulls[static_cast<std::size_t>(t)]] -
          rewards[static_cast<std::size_t>(t)];
      sse_truth += d * d;
    }
    bool ok = true;
    for (long c = 0; c < n && ok; ++c) {
      const double* cp =
          pred.data() +
          static_cast<std::size_t>(c) * static_cast<std::size_t>(num_beams);
      double sse_c = 0.0;
      double data_norm_sq = 0.0;
      for (long t = 0; t < num_pulls; ++t) {
        const int a = pulls[static_cast<std::size_t>(t)];
        const double d = cp[a] - rewards[static_cast<std::size_t>(t)];
        sse_c += d * d;
        const double g = cp[a] - truth_pred[a];
        data_norm_sq += g * g;
      }
      const double diff = sse_c - sse_truth;
      if (diff < 0.5 * data_norm_sq - bonus - eps ||
          diff > 1.5 * data_norm_sq + bonus + eps) {
        ok = false;
      }
    }
    if (ok) ++held;
  }
  return static_cast<double>(held) / static_cast<double>(trials);
}

RewardBoundCheck check_reward_bound(const ParameterGrid& grid, int num_paths,
                                    const PatternMatrix& patterns,
                                    double r_max) {
  if (!(r_max > 0.0)) {
    throw std::invalid_argument("reward bound: r_max must be positive");
  }
  CandidateSpace space(grid, num_paths);
  RewardBoundCheck out;
  for (long c = 0; c < space.num_candidates(); ++c) {
    for (int a = 0; a < patterns.num_beams; ++a) {
      out.max_abs_reward = std::max(
          out.max_abs_reward, std::fabs(space.predicted_reward(c, a, patterns)));
    }
  }
  out.holds = out.max_abs_reward <= r_max;
  return out;
}

}  // namespace beamalign
