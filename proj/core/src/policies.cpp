#include "beamalign/policies.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace beamalign {

Policy::Policy(int num_beams) : num_beams_(num_beams) {
  if (num_beams < 1) {
    throw std::invalid_argument("policy: num_beams must be >= 1");
  }
}

int Policy::select(long step) {
  if (awaiting_observe_) {
    throw std::runtime_error(
        "policy: sequencing error, select called before observe of step " +
        std::to_string(pending_step_));
  }
  if (step < 1 || (has_last_ && step <= last_step_)) {
    throw std::runtime_error("policy: sequencing error, steps must increase");
  }
  const int beam = do_select(step);
  if (beam < 0 || beam >= num_beams_) {
    throw std::logic_error("policy: selected beam out of range");
  }
  awaiting_observe_ = true;
  pending_step_ = step;
  pending_beam_ = beam;
  return beam;
}

void Policy::observe(long step, int beam, double reward_dbm) {
  if (!awaiting_observe_) {
    throw std::runtime_error(
        "policy: sequencing error, observe without a pending select");
  }
  if (step != pending_step_ || beam != pending_beam_) {
    throw std::runtime_error(
        "policy: sequencing error, observe does not match the pending select");
  }
  do_observe(step, beam, reward_dbm);
  awaiting_observe_ = false;
  has_last_ = true;
  last_step_ = step;
}

void Policy::reset() {
  awaiting_observe_ = false;
  pending_step_ = 0;
  pending_beam_ = -1;
  has_last_ = false;
  last_step_ = 0;
  do_reset();
}

UniformRandomPolicy::UniformRandomPolicy(int num_beams, std::uint64_t seed)
    : Policy(num_beams), seed_(seed), rng_(make_rng(seed)) {}

int UniformRandomPolicy::do_select(long) {
  std::uniform_int_distribution<int> dist(0, num_beams() - 1);
  return dist(rng_);
}

void UniformRandomPolicy::do_observe(long, int, double) {}

void UniformRandomPolicy::do_reset() { rng_ = make_rng(seed_); }

UcbPolicy::UcbPolicy(int num_beams, long horizon, std::uint64_t seed)
    : Policy(num_beams), horizon_(horizon) {
  (void)seed;
  if (horizon < 1) {
    throw std::invalid_argument("ucb: horizon must be >= 1");
  }
  counts_.assign(static_cast<std::size_t>(num_beams), 0);
  sums_.assign(static_cast<std::size_t>(num_beams), 0.0);
}

long UcbPolicy::pull_count(int beam) const {
  return counts_[static_cast<std::size_t>(beam)];
}

int UcbPolicy::do_select(long) {
  for (int a = 0; a < num_beams(); ++a) {
    if (counts_[static_cast<std::size_t>(a)] == 0) return a;
  }
  const double log_term = 2.0 * std::log(static_cast<double>(horizon_));
  int best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < num_beams(); ++a) {
    const double n = static_cast<double>(counts_[static_cast<std::size_t>(a)]);
    const double v =
        sums_[static_cast<std::size_t>(a)] / n + std::sqrt(log_term / n);
    if (v > best_v) {
      best_v = v;
      best = a;
    }
  }
  return best;
}

void UcbPolicy::do_observe(long, int beam, double reward_dbm) {
  counts_[static_cast<std::size_t>(beam)] += 1;
  sums_[static_cast<std::size_t>(beam)] += reward_dbm;
}

void UcbPolicy::do_reset() {
  std::fill(counts_.begin(), counts_.end(), 0);
  std::fill(sums_.begin(), sums_.end(), 0.0);
}

PrEtcPolicy::PrEtcPolicy(ParameterGrid grid, int num_paths,
                         PatternMatrix patterns, long explore_len,
                         std::uint64_t seed)
    : Policy(patterns.num_beams),
      grid_(std::move(grid)),
      num_paths_(num_paths),
      patterns_(std::move(patterns)),
      explore_len_(explore_len),
      seed_(seed),
      rng_(make_rng(seed)) {
  if (explore_len < 1) {
    throw std::invalid_argument("pr-etc: exploration length must be >= 1");
  }
}

int PrEtcPolicy::do_select(long) {
  if (static_cast<long>(history_.size()) < explore_len_) {
    std::uniform_int_distribution<int> dist(0, num_beams() - 1);
    return dist(rng_);
  }
  return *committed_;
}

void PrEtcPolicy::do_observe(long step, int beam, double reward_dbm) {
  if (committed_) return;  // post-commit observations are discarded
  history_.append({step, beam, reward_dbm});
  if (static_cast<long>(history_.size()) == explore_len_) {
    CandidateSpace space(grid_, num_paths_);
    const MleResult fit = mle_fit_detailed(history_, space, patterns_);
    estimate_ = space.params(fit.candidate_index);
    int best = 0;
    double best_r = space.predicted_reward(fit.candidate_index, 0, patterns_);
    for (int a = 1; a < num_beams(); ++a) {
      const double r = space.predicted_reward(fit.candidate_index, a, patterns_);
      if (r > best_r) {
        best_r = r;
        best = a;
      }
    }
    committed_ = best;
  }
}

void PrEtcPolicy::do_reset() {
  rng_ = make_rng(seed_);
  history_.clear();
  committed_.reset();
  estimate_.reset();
}

namespace {

ChannelParams validated_initial(const CandidateSpace& space,
                                std::optional<ChannelParams> initial) {
  if (!initial) return space.params(0);
  if (space.index_of(*initial) < 0) {
    throw std::invalid_argument(
        "pr-greedy: initial parameters must lie on the estimation grids");
  }
  return *initial;
}

}  // namespace

PrGreedyPolicy::PrGreedyPolicy(ParameterGrid grid, int num_paths,
                               PatternMatrix patterns,
                               std::optional<ChannelParams> initial,
                               std::uint64_t seed)
    : Policy(patterns.num_beams),
      state_(std::move(grid), num_paths, std::move(patterns)),
      initial_(validated_initial(state_.space(), std::move(initial))) {
  (void)seed;
}

int PrGreedyPolicy::do_select(long) {
  if (state_.num_observations() == 0) {
    return best_beam(initial_, state_.patterns());
  }
  return predict_best_beam(state_);
}

void PrGreedyPolicy::do_observe(long step, int beam, double reward_dbm) {
  state_.update({step, beam, reward_dbm});
}

void PrGreedyPolicy::do_reset() { state_.reset(); }

PeriodicPolicy::PeriodicPolicy(PolicyFactory base_factory,
                               std::string base_name, int num_beams, long tau,
                               std::uint64_t seed)
    : Policy(num_beams),
      factory_(std::move(base_factory)),
      base_name_(std::move(base_name)),
      tau_(tau),
      seed_(seed) {
  if (tau_ <= 0) {
    throw std::invalid_argument("periodic: tau must be >= 1");
  }
  if (!factory_) {
    throw std::invalid_argument("periodic: base factory is empty");
  }
}

int PeriodicPolicy::do_select(long step) {
  const long segment = (step - 1) / tau_;
  if (segment != segment_ || !base_) {
    base_ = factory_(derive_seed(seed_, static_cast<std::uint64_t>(segment)));
    if (!base_ || base_->num_beams() != num_beams()) {
      throw std::logic_error("periodic: base factory produced a bad policy");
    }
    segment_ = segment;
  }
  return base_->select(step - segment_ * tau_);
}

void PeriodicPolicy::do_observe(long step, int beam, double reward_dbm) {
  base_->observe(step - segment_ * tau_, beam, reward_dbm);
}

void PeriodicPolicy::do_reset() {
  base_.reset();
  segment_ = -1;
}

}  // namespace beamalign
