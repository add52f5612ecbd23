#include "beamalign/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace beamalign {

namespace {

double max_of(const std::vector<double>& v) {
  double m = v[0];
  for (double x : v) m = std::max(m, x);
  return m;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void check_horizon(const Environment& env, long steps) {
  if (const auto h = env.horizon(); h && steps > *h) {
    throw std::invalid_argument(
        "regret: length mismatch, actions exceed the environment horizon");
  }
}

}  // namespace

RegretTrace regret_trace(const std::vector<int>& actions,
                         const Environment& env) {
  check_horizon(env, static_cast<long>(actions.size()));
  RegretTrace trace;
  const std::size_t n = actions.size();
  trace.beams = actions;
  trace.inst.reserve(n);
  trace.cum.reserve(n);
  trace.norm.reserve(n);
  double cum = 0.0;
  double denom = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const int a = actions[t];
    if (a < 0 || a >= env.num_beams()) {
      throw std::invalid_argument("regret: action beam index out of range");
    }
    const std::vector<double> oracle = env.oracle_rewards(static_cast<long>(t));
    const double best = max_of(oracle);
    const double inst = best - oracle[static_cast<std::size_t>(a)];
    cum += inst;
    denom += best - mean_of(oracle);
    trace.inst.push_back(inst);
    trace.cum.push_back(cum);
    trace.norm.push_back(denom <= kDegenerateDenominator
                             ? std::numeric_limits<double>::quiet_NaN()
                             : cum / denom);
  }
  return trace;
}

namespace {

double normalized_common(const RegretTrace& trace, const Environment& env,
                         long horizon) {
  if (horizon < 1 || horizon > static_cast<long>(trace.cum.size())) {
    throw std::invalid_argument("normalized regret: horizon out of range");
  }
  double denom = 0.0;
  for (long t = 0; t < horizon; ++t) {
    const std::vector<double> oracle = env.oracle_rewards(t);
    denom += max_of(oracle) - mean_of(oracle);
  }
  if (denom <= kDegenerateDenominator) {
    throw std::runtime_error(
        "normalized regret: degenerate environment, flat reward function");
  }
  return trace.cum[static_cast<std::size_t>(horizon - 1)] / denom;
}

}  // namespace

double normalized_regret(const RegretTrace& trace, const Environment& env,
                         long horizon) {
  if (!env.stationary()) {
    throw std::invalid_argument(
        "normalized regret: stationary environment required");
  }
  return normalized_common(trace, env, horizon);
}

double normalized_dynamic_regret(const RegretTrace& trace,
                                 const Environment& env, long horizon) {
  return normalized_common(trace, env, horizon);
}

AggregateSummary aggregate(const std::vector<std::vector<double>>& series) {
  if (series.empty()) {
    throw std::invalid_argument("aggregate: at least one series required");
  }
  const std::size_t len = series[0].size();
  for (const auto& s : series) {
    if (s.size() != len) {
      throw std::invalid_argument("aggregate: series lengths differ");
    }
  }
  if (len == 0) {
    throw std::invalid_argument("aggregate: series are empty");
  }
  const std::size_t n = series.size();
  AggregateSummary out;
  out.mean.resize(len);
  out.stderr_mean.resize(len);
  for (std::size_t t = 0; t < len; ++t) {
    double s = 0.0;
    for (const auto& run : series) s += run[t];
    const double mean = s / static_cast<double>(n);
    out.mean[t] = mean;
    if (n == 1) {
      out.stderr_mean[t] = 0.0;
    } else {
      double ss = 0.0;
      for (const auto& run : series) {
        const double d = run[t] - mean;
        ss += d * d;
      }
      const double sample_std = std::sqrt(ss / static_cast<double>(n - 1));
      out.stderr_mean[t] = sample_std / std::sqrt(static_cast<double>(n));
    }
  }
  out.final_mean = out.mean.back();
  out.final_stderr = out.stderr_mean.back();
  return out;
}

}  // namespace beamalign
