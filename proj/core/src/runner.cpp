#include "beamalign/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace beamalign {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* raw = std::getenv("BEAMALIGN_LOG");
    if (!raw) return LogLevel::info;
    const std::string v(raw);
    if (v == "quiet") return LogLevel::quiet;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::info;
  }();
  return level;
}

void log_info(const std::string& message) {
  if (log_level() >= LogLevel::info) std::cerr << "[info] " << message << "\n";
}

void log_debug(const std::string& message) {
  if (log_level() >= LogLevel::debug) std::cerr << "[debug] " << message << "\n";
}

void log_warn(const std::string& message) {
  if (log_level() >= LogLevel::info) std::cerr << "[warn] " << message << "\n";
}

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

std::string env_description(const RunConfig& config) {
  std::ostringstream out;
  if (config.env_kind == EnvKind::synthetic) {
    out << "synthetic(K=" << config.num_beams << ",k="
        << config.theta_star_deg.size() << ",sigma=" << config.sigma << ")";
  } else {
    out << "trace(" << config.trace_path << ",factor=" << config.interp_factor
        << ")";
  }
  return out.str();
}

}  // namespace

Codebook build_codebook(const RunConfig& config, int num_beams) {
  return dft_codebook(config.geometry, num_beams);
}

std::unique_ptr<Environment> build_environment(const RunConfig& config) {
  if (config.env_kind == EnvKind::synthetic) {
    const Codebook codebook = build_codebook(config, config.num_beams);
    return std::make_unique<StationaryEnv>(truth_params(config), codebook,
                                           NoiseModel{config.sigma});
  }
  Trace trace = load_trace(config.trace_path);
  return std::make_unique<TraceEnv>(std::move(trace), config.interp_factor,
                                    NoiseModel{config.sigma});
}

PolicySetup make_policy_setup(const RunConfig& config, int num_beams,
                              std::vector<std::string>* warnings) {
  const std::string& name = config.policy_name;
  const long horizon = config.tau > 0 ? config.tau : config.horizon;

  PolicySetup setup;
  PolicyFactory base;
  if (name == "uniform-random") {
    base = [num_beams](std::uint64_t seed) {
      return std::make_unique<UniformRandomPolicy>(num_beams, seed);
    };
  } else if (name == "ucb") {
    base = [num_beams, horizon](std::uint64_t seed) {
      return std::make_unique<UcbPolicy>(num_beams, horizon, seed);
    };
  } else if (name == "pr-etc" || name == "pr-greedy") {
    const ParameterGrid grid = config_grids(config);
    const Codebook codebook = build_codebook(config, num_beams);
    const PatternMatrix patterns = pattern_matrix(codebook, grid.thetas_rad);
    const int k = config.num_paths;
    if (name == "pr-etc") {
      long m = config.explore_len;
      if (config.explore_len_auto) {
        m = theoretical_m(config.horizon, k, config.sigma,
                          static_cast<double>(grid.num_gains()),
                          static_cast<double>(grid.num_angles()));
        log_info("pr-etc exploration length from the horizon formula: m = " +
                 std::to_string(m));
      }
      if (m > horizon && warnings) {
        warnings->push_back("pr-etc: m = " + std::to_string(m) +
                            " exceeds the horizon " + std::to_string(horizon) +
                            "; the run never commits (all-explore)");
      }
      base = [grid, patterns, k, m](std::uint64_t seed) {
        return std::make_unique<PrEtcPolicy>(grid, k, patterns, m, seed);
      };
    } else {
      std::optional<ChannelParams> initial;
      if (!config.initial_theta_deg.empty() || !config.initial_beta.empty()) {
        if (config.initial_theta_deg.size() != config.initial_beta.size() ||
            config.initial_theta_deg.size() != static_cast<std::size_t>(k)) {
          throw std::runtime_error(
              "config: initial_theta_deg and initial_beta must both have k entries");
        }
        std::vector<double> thetas;
        std::vector<cplx> betas;
        for (std::size_t i = 0; i < config.initial_theta_deg.size(); ++i) {
          thetas.push_back(deg_to_rad(config.initial_theta_deg[i]));
          betas.push_back(cplx(config.initial_beta[i], 0.0));
        }
        initial = ChannelParams(std::move(thetas), std::move(betas));
      }
      base = [grid, patterns, k, initial](std::uint64_t seed) {
        return std::make_unique<PrGreedyPolicy>(grid, k, patterns, initial,
                                                seed);
      };
    }
  } else {
    throw std::runtime_error("config: unknown policy '" + name + "'");
  }

  if (config.tau > 0) {
    const long tau = config.tau;
    setup.name = "periodic-" + name;
    setup.factory = [base, name, num_beams, tau](std::uint64_t seed) {
      return std::make_unique<PeriodicPolicy>(base, name, num_beams, tau, seed);
    };
  } else {
    setup.name = name;
    setup.factory = base;
  }
  return setup;
}

namespace {

struct SimResult {
  std::vector<int> beams;
  std::vector<double> rewards;
  double policy_seconds = 0.0;
};

SimResult simulate(Policy& policy, const Environment& env, long horizon,
                   Rng& env_rng) {
  SimResult result;
  result.beams.reserve(static_cast<std::size_t>(horizon));
  result.rewards.reserve(static_cast<std::size_t>(horizon));
  using clock = std::chrono::steady_clock;
  std::chrono::nanoseconds spent{0};
  for (long t = 1; t <= horizon; ++t) {
    const auto s0 = clock::now();
    const int beam = policy.select(t);
    spent += clock::now() - s0;

    const double reward = env.sample(t - 1, beam, env_rng);

    const auto o0 = clock::now();
    policy.observe(t, beam, reward);
    spent += clock::now() - o0;

    result.beams.push_back(beam);
    result.rewards.push_back(reward);
  }
  result.policy_seconds =
      std::chrono::duration_cast<std::chrono::duration<double>>(spent).count();
  return result;
}

void write_run_csv(const std::string& path,
                   const std::vector<RegretTrace>& traces) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("output csv: cannot open for writing: " + path);
  }
  out << "rep,step,policy,beam,reward_dbm,inst_regret,cum_regret,norm_regret\n";
  for (std::size_t rep = 0; rep < traces.size(); ++rep) {
    const RegretTrace& trace = traces[rep];
    for (std::size_t t = 0; t < trace.beams.size(); ++t) {
      out << rep << ',' << (t + 1) << ',' << trace.policy << ','
          << trace.beams[t] << ',' << fmt_double(trace.rewards_dbm[t]) << ','
          << fmt_double(trace.inst[t]) << ',' << fmt_double(trace.cum[t])
          << ',' << fmt_double(trace.norm[t]) << "\n";
    }
  }
  if (!out) {
    throw std::runtime_error("output csv: write failed: " + path);
  }
}

}  // namespace

RunReport run_experiment(const RunConfig& config) {
  const std::unique_ptr<Environment> env = build_environment(config);
  if (const auto h = env->horizon(); h && config.horizon > *h) {
    throw std::runtime_error(
        "run: horizon " + std::to_string(config.horizon) +
        " exceeds the trace horizon " + std::to_string(*h) +
        "; traces are never extrapolated");
  }

  RunReport report;
  report.horizon = config.horizon;
  PolicySetup setup = make_policy_setup(config, env->num_beams(), &report.warnings);
  report.policy_name = setup.name;
  for (const std::string& w : report.warnings) log_warn(w);

  const std::string env_id = env_description(config);
  double policy_seconds = 0.0;
  std::vector<std::vector<double>> cum_series;
  for (long rep = 0; rep < config.repetitions; ++rep) {
    const std::uint64_t policy_seed =
        derive_seed(config.seed, "policy", static_cast<std::uint64_t>(rep));
    const std::uint64_t env_seed =
        derive_seed(config.seed, "env", static_cast<std::uint64_t>(rep));
    const std::unique_ptr<Policy> policy = setup.factory(policy_seed);
    Rng env_rng = make_rng(env_seed);
    SimResult sim = simulate(*policy, *env, config.horizon, env_rng);
    policy_seconds += sim.policy_seconds;

    RegretTrace trace = regret_trace(sim.beams, *env);
    trace.policy = setup.name;
    trace.seed = policy_seed;
    trace.env_id = env_id;
    trace.rewards_dbm = std::move(sim.rewards);
    cum_series.push_back(trace.cum);
    report.traces.push_back(std::move(trace));
    log_debug("rep " + std::to_string(rep) + " done");
  }
  report.cum_regret_summary = aggregate(cum_series);
  report.mean_step_seconds =
      policy_seconds /
      static_cast<double>(config.repetitions * config.horizon);

  report.csv_path = config.output_path;
  write_run_csv(report.csv_path, report.traces);
  log_info("wrote " + report.csv_path);
  return report;
}

namespace {

std::string sweep_output_path(const std::string& base,
                              const std::string& policy, std::uint64_t seed,
                              long horizon) {
  std::string stem = base;
  std::string ext = ".csv";
  const std::size_t dot = base.rfind('.');
  if (dot != std::string::npos && dot > 0) {
    stem = base.substr(0, dot);
    ext = base.substr(dot);
  }
  std::ostringstream out;
  out << stem << '_' << policy << "_s" << seed << "_T" << horizon << ext;
  return out.str();
}

}  // namespace

std::vector<RunReport> run_sweep(const RunConfig& config) {
  std::vector<std::string> policies = config.sweep_policies;
  if (policies.empty()) policies.push_back(config.policy_name);
  std::vector<std::uint64_t> seeds = config.sweep_seeds;
  if (seeds.empty()) seeds.push_back(config.seed);
  std::vector<long> horizons = config.sweep_horizons;
  if (horizons.empty()) horizons.push_back(config.horizon);

  std::vector<RunReport> reports;
  for (const std::string& policy : policies) {
    for (const std::uint64_t seed : seeds) {
      for (const long horizon : horizons) {
        RunConfig combo = config;
        combo.policy_name = policy;
        combo.seed = seed;
        combo.horizon = horizon;
        combo.output_path =
            sweep_output_path(config.output_path, policy, seed, horizon);
        log_info("sweep: policy=" + policy + " seed=" + std::to_string(seed) +
                 " T=" + std::to_string(horizon));
        reports.push_back(run_experiment(combo));
      }
    }
  }
  return reports;
}

AssumptionReport verify_assumptions(const RunConfig& config) {
  if (config.env_kind != EnvKind::synthetic) {
    throw std::runtime_error(
        "verify-assumptions: a synthetic environment with ground truth is required");
  }
  const ParameterGrid grid = config_grids(config);
  const Codebook codebook = build_codebook(config, config.num_beams);
  const PatternMatrix patterns = pattern_matrix(codebook, grid.thetas_rad);
  const ChannelParams truth = truth_params(config);
  const int k = truth.num_paths();

  AssumptionReport report;
  report.r_max = config.r_max;
  report.delta = config.delta;
  report.trials = config.trials;
  report.assumption2 = fit_assumption2(truth, grid, patterns);
  report.assumption3 = fit_assumption3(truth, grid, patterns);
  report.reward_bound = check_reward_bound(grid, k, patterns, config.r_max);
  report.theoretical_explore_len =
      theoretical_m(config.horizon, k, config.sigma,
                    static_cast<double>(grid.num_gains()),
                    static_cast<double>(grid.num_angles()));
  if (config.trials > 0 && config.pulls > 0) {
    CandidateSpace space(grid, k);
    const long table_entries = space.num_candidates() * config.num_beams;
    if (table_entries > 50L * 1000 * 1000) {
      throw std::runtime_error(
          "verify-assumptions: grids too large for the concentration check");
    }
    Rng rng = make_rng(derive_seed(config.seed, "analysis"));
    report.concentration_coverage =
        concentration_check(truth, grid, patterns, config.pulls, config.delta,
                            config.sigma, config.trials, rng);
  }
  return report;
}

std::string format_assumption_report(const AssumptionReport& report) {
  std::ostringstream out;
  const auto describe = [&](const char* label, const AssumptionFit& fit,
                            const char* c_lo, const char* c_hi) {
    out << label << ": ";
    if (fit.feasible) {
      out << "feasible, " << c_lo << " = " << fmt_double(fit.first) << ", "
          << c_hi << " = " << fmt_double(fit.second) << "\n";
    } else {
      out << "infeasible; binding candidate index " << fit.worst_candidate
          << " (lhs " << fmt_double(fit.worst_lhs) << " vs rhs "
          << fmt_double(fit.worst_rhs) << ")\n";
    }
  };
  describe("reward-gap lower bound (quadratic)", report.assumption2, "C1", "C2");
  describe("reward-gap Lipschitz upper bound", report.assumption3, "C3", "C4");
  out << "reward bound: max |R| over grid = "
      << fmt_fixed(report.reward_bound.max_abs_reward, 3) << " dBm, limit "
      << fmt_fixed(report.r_max, 3) << " dBm -> "
      << (report.reward_bound.holds ? "holds" : "violated") << "\n";
  out << "exploration length from the horizon formula: m = "
      << report.theoretical_explore_len << "\n";
  if (report.concentration_coverage >= 0.0) {
    out << "data-norm concentration: coverage "
        << fmt_fixed(report.concentration_coverage, 4) << " over "
        << report.trials << " trials (target >= " << fmt_fixed(1.0 - report.delta, 4)
        << ")\n";
  } else {
    out << "data-norm concentration: skipped\n";
  }
  return out.str();
}

void write_assumption_csv(const AssumptionReport& report,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("assumption csv: cannot open for writing: " + path);
  }
  out << "key,value\n";
  out << "c1," << fmt_double(report.assumption2.first) << "\n";
  out << "c2," << fmt_double(report.assumption2.second) << "\n";
  out << "assumption2_feasible," << (report.assumption2.feasible ? 1 : 0) << "\n";
  out << "c3," << fmt_double(report.assumption3.first) << "\n";
  out << "c4," << fmt_double(report.assumption3.second) << "\n";
  out << "assumption3_feasible," << (report.assumption3.feasible ? 1 : 0) << "\n";
  out << "max_abs_reward_dbm," << fmt_double(report.reward_bound.max_abs_reward)
      << "\n";
  out << "reward_bound_holds," << (report.reward_bound.holds ? 1 : 0) << "\n";
  out << "r_max_dbm," << fmt_double(report.r_max) << "\n";
  out << "theoretical_m," << report.theoretical_explore_len << "\n";
  out << "concentration_coverage," << fmt_double(report.concentration_coverage)
      << "\n";
  out << "concentration_trials," << report.trials << "\n";
  out << "delta," << fmt_double(report.delta) << "\n";
  if (!out) {
    throw std::runtime_error("assumption csv: write failed: " + path);
  }
}

std::string format_run_report(const RunReport& report) {
  std::ostringstream out;
  out << "policy " << report.policy_name << ": " << report.traces.size()
      << " repetition(s) x " << report.horizon << " steps\n";
  out << "  mean per-step policy time: "
      << fmt_fixed(report.mean_step_seconds * 1e3, 4) << " ms\n";
  out << "  final cumulative regret: "
      << fmt_fixed(report.cum_regret_summary.final_mean, 4) << " +/- "
      << fmt_fixed(report.cum_regret_summary.final_stderr, 4)
      << " dBm (mean +/- stderr)\n";
  double norm_sum = 0.0;
  for (const RegretTrace& trace : report.traces) norm_sum += trace.norm.back();
  out << "  final normalized regret (mean): "
      << fmt_fixed(norm_sum / static_cast<double>(report.traces.size()), 4)
      << "\n";
  out << "  csv: " << report.csv_path << "\n";
  return out.str();
}

}  // namespace beamalign
