#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "beamalign/estimation.hpp"
#include "beamalign/rng.hpp"

namespace beamalign {

// Bandit policy protocol: steps are 1-based; select and observe strictly
// alternate, one pair per step, and observe must echo the selected step
// and beam. The base class enforces the discipline.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  int num_beams() const { return num_beams_; }

  int select(long step);
  void observe(long step, int beam, double reward_dbm);
  void reset();

 protected:
  explicit Policy(int num_beams);
  virtual int do_select(long step) = 0;
  virtual void do_observe(long step, int beam, double reward_dbm) = 0;
  virtual void do_reset() = 0;

 private:
  int num_beams_;
  bool awaiting_observe_ = false;
  long pending_step_ = 0;
  int pending_beam_ = -1;
  bool has_last_ = false;
  long last_step_ = 0;
};

class UniformRandomPolicy : public Policy {
 public:
  UniformRandomPolicy(int num_beams, std::uint64_t seed);
  std::string name() const override { return "uniform-random"; }

 protected:
  int do_select(long step) override;
  void do_observe(long step, int beam, double reward_dbm) override;
  void do_reset() override;

 private:
  std::uint64_t seed_;
  Rng rng_;
};

// Index-order sweep until every beam has one pull, then mean reward plus
// sqrt(2 ln T / N) with lowest-index tie-break. Rewards enter in raw dBm.
class UcbPolicy : public Policy {
 public:
  UcbPolicy(int num_beams, long horizon, std::uint64_t seed);
  std::string name() const override { return "ucb"; }

  long pull_count(int beam) const;

 protected:
  int do_select(long step) override;
  void do_observe(long step, int beam, double reward_dbm) override;
  void do_reset() override;

 private:
  long horizon_;
  std::vector<long> counts_;
  std::vector<double> sums_;
};

// Explore-then-commit: the first explore_len steps pick beams uniformly at
// random; one least-squares fit on that history fixes the beam played for
// the rest of the run.
class PrEtcPolicy : public Policy {
 public:
  PrEtcPolicy(ParameterGrid grid, int num_paths, PatternMatrix patterns,
              long explore_len, std::uint64_t seed);
  std::string name() const override { return "pr-etc"; }

  long explore_len() const { return explore_len_; }
  std::optional<int> committed_beam() const { return committed_; }
  const std::optional<ChannelParams>& estimate() const { return estimate_; }

 protected:
  int do_select(long step) override;
  void do_observe(long step, int beam, double reward_dbm) override;
  void do_reset() override;

 private:
  ParameterGrid grid_;
  int num_paths_;
  PatternMatrix patterns_;
  long explore_len_;
  std::uint64_t seed_;
  Rng rng_;
  History history_;
  std::optional<int> committed_;
  std::optional<ChannelParams> estimate_;
};

// Greedy with per-step refit: play the best beam under the current estimate,
// observe, fold the observation into the running least-squares state.
class PrGreedyPolicy : public Policy {
 public:
  PrGreedyPolicy(ParameterGrid grid, int num_paths, PatternMatrix patterns,
                 std::optional<ChannelParams> initial, std::uint64_t seed);
  std::string name() const override { return "pr-greedy"; }

  const EstimatorState& estimator() const { return state_; }
  const ChannelParams& initial_params() const { return initial_; }

 protected:
  int do_select(long step) override;
  void do_observe(long step, int beam, double reward_dbm) override;
  void do_reset() override;

 private:
  EstimatorState state_;
  ChannelParams initial_;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>(std::uint64_t)>;

// Restart wrapper: segment n (1-based) covers steps (n-1)*tau+1 .. n*tau and
// is served by a fresh base instance seeded from derive_seed(seed, n-1);
// base instances see segment-local steps 1..tau, and nothing crosses the
// boundary.
class PeriodicPolicy : public Policy {
 public:
  PeriodicPolicy(PolicyFactory base_factory, std::string base_name,
                 int num_beams, long tau, std::uint64_t seed);
  std::string name() const override { return "periodic-" + base_name_; }

  long tau() const { return tau_; }
  long current_segment() const { return segment_; }  // 0-based; -1 before start
  Policy* current_base() { return base_.get(); }
  const Policy* current_base() const { return base_.get(); }

 protected:
  int do_select(long step) override;
  void do_observe(long step, int beam, double reward_dbm) override;
  void do_reset() override;

 private:
  PolicyFactory factory_;
  std::string base_name_;
  long tau_;
  std::uint64_t seed_;
  std::unique_ptr<Policy> base_;
  long segment_ = -1;
};

}  // namespace beamalign
