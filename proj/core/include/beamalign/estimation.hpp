#pragma once

#include <cstdint>
#include <vector>

#include "beamalign/array.hpp"
#include "beamalign/channel.hpp"

namespace beamalign {

struct Observation {
  long step = 0;  // strictly increasing within a history
  int beam = 0;
  double reward_dbm = 0.0;
};

class History {
 public:
  void append(const Observation& obs);
  const std::vector<Observation>& observations() const { return obs_; }
  bool empty() const { return obs_.empty(); }
  std::size_t size() const { return obs_.size(); }
  void clear() { obs_.clear(); }

 private:
  std::vector<Observation> obs_;
};

// Enumeration of the discrete candidate space: angle k-tuples are sorted
// nondecreasing (repetition allowed) to collapse path permutations, gains
// run over the full product grid. Order is lexicographic, angle tuple major.
class CandidateSpace {
 public:
  CandidateSpace(ParameterGrid grid, int num_paths);

  long num_candidates() const { return num_candidates_; }
  long num_theta_tuples() const {
    return static_cast<long>(theta_tuples_.size() / static_cast<std::size_t>(k_));
  }
  long gains_per_tuple() const { return gains_per_tuple_; }
  int num_paths() const { return k_; }
  const ParameterGrid& grid() const { return grid_; }

  // Grid indices of candidate c; both outputs must hold num_paths() ints.
  void decode(long candidate, int* theta_idx, int* gain_idx) const;
  ChannelParams params(long candidate) const;

  // Reward the candidate predicts for one beam. Bit-identical to
  // expected_reward(params(candidate), beam, patterns).
  double predicted_reward(long candidate, int beam,
                          const PatternMatrix& patterns) const;

  // Candidate index of on-grid parameters; -1 if any component is off-grid.
  long index_of(const ChannelParams& params) const;

 private:
  ParameterGrid grid_;
  int k_;
  std::vector<int> theta_tuples_;  // flattened, stride k_
  long gains_per_tuple_ = 1;
  long num_candidates_ = 0;
};

// Batch SSE of one candidate over a history, accumulated in step order.
double sse(const ChannelParams& candidate, const History& history,
           const PatternMatrix& patterns);

struct MleResult {
  long candidate_index = -1;
  double sse = 0.0;
};

// Grid-search least squares. Ties break to the first candidate in
// enumeration order. Empty history is an error.
MleResult mle_fit_detailed(const History& history, const CandidateSpace& space,
                           const PatternMatrix& patterns);
ChannelParams mle_fit(const History& history, const ParameterGrid& grid,
                      int num_paths, const PatternMatrix& patterns);

// Per-candidate running SSE, maintained one observation at a time. The best
// candidate after any prefix equals mle_fit on that prefix, exactly,
// including tie-breaks.
class EstimatorState {
 public:
  EstimatorState(ParameterGrid grid, int num_paths, PatternMatrix patterns);

  void update(const Observation& obs);

  long num_observations() const { return num_obs_; }
  long best_candidate() const;  // throws until the first update
  double best_sse() const;
  double candidate_sse(long candidate) const;
  ChannelParams best_params() const;

  const CandidateSpace& space() const { return space_; }
  const PatternMatrix& patterns() const { return patterns_; }

  void reset();

 private:
  double prediction(long candidate, int beam);

  CandidateSpace space_;
  PatternMatrix patterns_;
  std::vector<double> sse_;
  // Per-beam prediction columns, built on first use when the total fits a
  // fixed memory budget.
  bool use_cache_ = false;
  std::vector<double> cache_;
  std::vector<char> cache_ready_;
  long best_ = -1;
  long num_obs_ = 0;
  long last_step_ = 0;
};

// Best beam under the state's current estimate; lowest index wins ties.
int predict_best_beam(const EstimatorState& state);
int predict_best_beam(const ChannelParams& params, const PatternMatrix& patterns);

}  // namespace beamalign
