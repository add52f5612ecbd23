#include "beamalign/estimation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace beamalign {

namespace {

constexpr long kCacheEntryBudget = 16L * 1000 * 1000;

}  // namespace

void History::append(const Observation& obs) {
  if (!obs_.empty() && obs.step <= obs_.back().step) {
    throw std::runtime_error("history: sequencing error, steps must increase");
  }
  if (obs.beam < 0) {
    throw std::invalid_argument("history: beam index must be nonnegative");
  }
  if (!std::isfinite(obs.reward_dbm)) {
    throw std::invalid_argument("history: reward must be finite");
  }
  obs_.push_back(obs);
}

CandidateSpace::CandidateSpace(ParameterGrid grid, int num_paths)
    : grid_(std::move(grid)), k_(num_paths) {
  validate(grid_);
  if (k_ < 1) {
    throw std::invalid_argument("candidate space: num_paths must be >= 1");
  }
  const int t = static_cast<int>(grid_.num_angles());
  // Enumerate nondecreasing k-tuples over angle indices, lexicographically.
  std::vector<int> tuple(static_cast<std::size_t>(k_), 0);
  while (true) {
    theta_tuples_.insert(theta_tuples_.end(), tuple.begin(), tuple.end());
    int pos = k_ - 1;
    while (pos >= 0 && tuple[static_cast<std::size_t>(pos)] == t - 1) --pos;
    if (pos < 0) break;
    const int v = ++tuple[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < k_; ++i) tuple[static_cast<std::size_t>(i)] = v;
  }
  gains_per_tuple_ = 1;
  for (int i = 0; i < k_; ++i) {
    gains_per_tuple_ *= static_cast<long>(grid_.num_gains());
  }
  num_candidates_ = num_theta_tuples() * gains_per_tuple_;
}

void CandidateSpace::decode(long candidate, int* theta_idx,
                            int* gain_idx) const {
  if (candidate < 0 || candidate >= num_candidates_) {
    throw std::invalid_argument("candidate space: index out of range");
  }
  const long tuple = candidate / gains_per_tuple_;
  long rank = candidate % gains_per_tuple_;
  const int* base = theta_tuples_.data() +
                    static_cast<std::size_t>(tuple) * static_cast<std::size_t>(k_);
  for (int i = 0; i < k_; ++i) theta_idx[i] = base[i];
  const long nb = static_cast<long>(grid_.num_gains());
  for (int i = k_ - 1; i >= 0; --i) {
    gain_idx[i] = static_cast<int>(rank % nb);
    rank /= nb;
  }
}

ChannelParams CandidateSpace::params(long candidate) const {
  std::vector<int> ti(static_cast<std::size_t>(k_));
  std::vector<int> gi(static_cast<std::size_t>(k_));
  decode(candidate, ti.data(), gi.data());
  std::vector<double> thetas(static_cast<std::size_t>(k_));
  std::vector<cplx> betas(static_cast<std::size_t>(k_));
  for (int i = 0; i < k_; ++i) {
    thetas[static_cast<std::size_t>(i)] =
        grid_.thetas_rad[static_cast<std::size_t>(ti[i])];
    betas[static_cast<std::size_t>(i)] =
        grid_.gains[static_cast<std::size_t>(gi[i])];
  }
  return ChannelParams(std::move(thetas), std::move(betas));
}

double CandidateSpace::predicted_reward(long candidate, int beam,
                                        const PatternMatrix& patterns) const {
  const long tuple = candidate / gains_per_tuple_;
  long rank = candidate % gains_per_tuple_;
  const int* ti = theta_tuples_.data() +
                  static_cast<std::size_t>(tuple) * static_cast<std::size_t>(k_);
  const long nb = static_cast<long>(grid_.num_gains());
  // Gains decode most-significant first; accumulate paths in index order so
  // this matches channel_response on the same sorted parameters.
  cplx acc(0.0, 0.0);
  long div = gains_per_tuple_;
  for (int i = 0; i < k_; ++i) {
    div /= nb;
    const int gi = static_cast<int>((rank / div) % nb);
    acc += grid_.gains[static_cast<std::size_t>(gi)] *
           patterns.entry(beam, ti[i]);
  }
  return reward_dbm_from_response(acc);
}

long CandidateSpace::index_of(const ChannelParams& params) const {
  if (params.num_paths() != k_) return -1;
  std::vector<int> ti(static_cast<std::size_t>(k_));
  std::vector<int> gi(static_cast<std::size_t>(k_));
  for (int i = 0; i < k_; ++i) {
    const double th = params.thetas_rad()[static_cast<std::size_t>(i)];
    const cplx b = params.betas()[static_cast<std::size_t>(i)];
    int tfound = -1;
    for (std::size_t j = 0; j < grid_.num_angles(); ++j) {
      if (grid_.thetas_rad[j] == th) {
        tfound = static_cast<int>(j);
        break;
      }
    }
    int gfound = -1;
    for (std::size_t j = 0; j < grid_.num_gains(); ++j) {
      if (grid_.gains[j] == b) {
        gfound = static_cast<int>(j);
        break;
      }
    }
    if (tfound < 0 || gfound < 0) return -1;
    ti[static_cast<std::size_t>(i)] = tfound;
    gi[static_cast<std::size_t>(i)] = gfound;
  }
  // Angles in ChannelParams are already sorted, so the tuple is valid;
  // locate it by scanning (tuple count is small).
  const long tuples = num_theta_tuples();
  long tuple_idx = -1;
  for (long j = 0; j < tuples; ++j) {
    const int* base = theta_tuples_.data() +
                      static_cast<std::size_t>(j) * static_cast<std::size_t>(k_);
    bool eq = true;
    for (int i = 0; i < k_; ++i) {
      if (base[i] != ti[static_cast<std::size_t>(i)]) {
        eq = false;
        break;
      }
    }
    if (eq) {
      tuple_idx = j;
      break;
    }
  }
  if (tuple_idx < 0) return -1;
  long rank = 0;
  for (int i = 0; i < k_; ++i) {
    rank = rank * static_cast<long>(grid_.num_gains()) +
           gi[static_cast<std::size_t>(i)];
  }
  return tuple_idx * gains_per_tuple_ + rank;
}

double sse(const ChannelParams& candidate, const History& history,
           const PatternMatrix& patterns) {
  double acc = 0.0;
  for (const Observation& obs : history.observations()) {
    const double pred = expected_reward(candidate, obs.beam, patterns);
    const double d = pred - obs.reward_dbm;
    acc += d * d;
  }
  return acc;
}

MleResult mle_fit_detailed(const History& history, const CandidateSpace& space,
                           const PatternMatrix& patterns) {
  if (history.empty()) {
    throw std::runtime_error("mle_fit: insufficient data, history is empty");
  }
  const int num_beams = patterns.num_beams;
  for (const Observation& obs : history.observations()) {
    if (obs.beam < 0 || obs.beam >= num_beams) {
      throw std::invalid_argument("mle_fit: observed beam out of range");
    }
  }
  std::vector<char> beam_seen(static_cast<std::size_t>(num_beams), 0);
  for (const Observation& obs : history.observations()) {
    beam_seen[static_cast<std::size_t>(obs.beam)] = 1;
  }
  std::vector<double> pred(static_cast<std::size_t>(num_beams), 0.0);

  MleResult best;
  best.sse = std::numeric_limits<double>::infinity();
  const long n = space.num_candidates();
  for (long c = 0; c < n; ++c) {
    for (int a = 0; a < num_beams; ++a) {
      if (beam_seen[static_cast<std::size_t>(a)]) {
        pred[static_cast<std::size_t>(a)] = space.predicted_reward(c, a, patterns);
      }
    }
    // Accumulate in step order so the total is bitwise equal to the
    // incremental estimator's running sum.
    double acc = 0.0;
    for (const Observation& obs : history.observations()) {
      const double d = pred[static_cast<std::size_t>(obs.beam)] - obs.reward_dbm;
      acc += d * d;
    }
    if (acc < best.sse) {
      best.sse = acc;
      best.candidate_index = c;
    }
  }
  return best;
}

ChannelParams mle_fit(const History& history, const ParameterGrid& grid,
                      int num_paths, const PatternMatrix& patterns) {
  CandidateSpace space(grid, num_paths);
  return space.params(mle_fit_detailed(history, space, patterns).candidate_index);
}

EstimatorState::EstimatorState(ParameterGrid grid, int num_paths,
                               PatternMatrix patterns)
    : space_(std::move(grid), num_paths), patterns_(std::move(patterns)) {
  if (patterns_.num_beams < 1) {
    throw std::invalid_argument("estimator: pattern matrix has no beams");
  }
  sse_.assign(static_cast<std::size_t>(space_.num_candidates()), 0.0);
  const long total = space_.num_candidates() * patterns_.num_beams;
  use_cache_ = total <= kCacheEntryBudget;
  if (use_cache_) {
    cache_.assign(static_cast<std::size_t>(total), 0.0);
    cache_ready_.assign(static_cast<std::size_t>(patterns_.num_beams), 0);
  }
}

double EstimatorState::prediction(long candidate, int beam) {
  if (!use_cache_) return space_.predicted_reward(candidate, beam, patterns_);
  if (!cache_ready_[static_cast<std::size_t>(beam)]) {
    double* col = cache_.data() +
                  static_cast<std::size_t>(beam) *
                      static_cast<std::size_t>(space_.num_candidates());
    for (long c = 0; c < space_.num_candidates(); ++c) {
      col[c] = space_.predicted_reward(c, beam, patterns_);
    }
    cache_ready_[static_cast<std::size_t>(beam)] = 1;
  }
  return cache_[static_cast<std::size_t>(beam) *
                    static_cast<std::size_t>(space_.num_candidates()) +
                static_cast<std::size_t>(candidate)];
}

void EstimatorState::update(const Observation& obs) {
  if (num_obs_ > 0 && obs.step <= last_step_) {
    throw std::runtime_error(
        "estimator: sequencing error, observation step must increase");
  }
  if (obs.beam < 0 || obs.beam >= patterns_.num_beams) {
    throw std::invalid_argument("estimator: observed beam out of range");
  }
  if (!std::isfinite(obs.reward_dbm)) {
    throw std::invalid_argument("estimator: reward must be finite");
  }
  const long n = space_.num_candidates();
  for (long c = 0; c < n; ++c) {
    const double d = prediction(c, obs.beam) - obs.reward_dbm;
    sse_[static_cast<std::size_t>(c)] += d * d;
  }
  best_ = 0;
  double best_sse = sse_[0];
  for (long c = 1; c < n; ++c) {
    if (sse_[static_cast<std::size_t>(c)] < best_sse) {
      best_sse = sse_[static_cast<std::size_t>(c)];
      best_ = c;
    }
  }
  last_step_ = obs.step;
  ++num_obs_;
}

long EstimatorState::best_candidate() const {
  if (num_obs_ == 0) {
    throw std::runtime_error("estimator: insufficient data, no observations");
  }
  return best_;
}

double EstimatorState::best_sse() const {
  return sse_[static_cast<std::size_t>(best_candidate())];
}

double EstimatorState::candidate_sse(long candidate) const {
  if (candidate < 0 || candidate >= space_.num_candidates()) {
    throw std::invalid_argument("estimator: candidate index out of range");
  }
  return sse_[static_cast<std::size_t>(candidate)];
}

ChannelParams EstimatorState::best_params() const {
  return space_.params(best_candidate());
}

void EstimatorState::reset() {
  std::fill(sse_.begin(), sse_.end(), 0.0);
  if (use_cache_) {
    // Cached predictions depend only on grids and patterns; keep them.
  }
  best_ = -1;
  num_obs_ = 0;
  last_step_ = 0;
}

int predict_best_beam(const EstimatorState& state) {
  const long c = state.best_candidate();
  const PatternMatrix& patterns = state.patterns();
  int best = 0;
  double best_r = state.space().predicted_reward(c, 0, patterns);
  for (int a = 1; a < patterns.num_beams; ++a) {
    const double r = state.space().predicted_reward(c, a, patterns);
    if (r > best_r) {
      best_r = r;
      best = a;
    }
  }
  return best;
}

int predict_best_beam(const ChannelParams& params,
                      const PatternMatrix& patterns) {
  return best_beam(params, patterns);
}

}  // namespace beamalign
