#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "beamalign/estimation.hpp"
#include "beamalign/rng.hpp"
#include "test_support.hpp"

using beamalign::CandidateSpace;
using beamalign::ChannelParams;
using beamalign::cplx;
using beamalign::EstimatorState;
using beamalign::History;
using beamalign::Observation;
using beamalign::ParameterGrid;
using beamalign::PatternMatrix;
using testsupport::make_geometry;

namespace {

struct Fixture {
  ParameterGrid grid;
  PatternMatrix patterns;
  int num_beams = 0;
};

Fixture small_fixture(std::size_t num_angles, std::size_t num_gains,
                      int num_beams) {
  Fixture f;
  f.grid.thetas_rad = testsupport::spread_angles_rad(num_angles, 8.0, 140.0);
  for (std::size_t i = 0; i < num_gains; ++i)
    f.grid.gains.emplace_back(0.5 * static_cast<double>(i + 1), 0.0);
  const auto cb = beamalign::dft_codebook(make_geometry(num_beams), num_beams);
  f.patterns = beamalign::pattern_matrix(cb, f.grid.thetas_rad);
  f.num_beams = num_beams;
  return f;
}

// Oracle: exhaustive grid scan written against the raw definitions, nested
// loops over scalar grid indices, no shared code with CandidateSpace.
struct BruteResult {
  std::size_t theta_idx = 0;
  std::size_t gain_idx = 0;
  double sse = 0.0;
};

BruteResult brute_force_k1(const History& history, const ParameterGrid& grid,
                           const PatternMatrix& patterns) {
  BruteResult best;
  bool first = true;
  for (std::size_t j = 0; j < grid.thetas_rad.size(); ++j) {
    for (std::size_t m = 0; m < grid.gains.size(); ++m) {
      const ChannelParams cand({grid.thetas_rad[j]}, {grid.gains[m]});
      double acc = 0.0;
      for (const auto& obs : history.observations()) {
        const double pred =
            beamalign::expected_reward(cand, obs.beam, patterns);
        const double d = pred - obs.reward_dbm;
        acc += d * d;
      }
      if (first || acc < best.sse) {
        first = false;
        best = BruteResult{j, m, acc};
      }
    }
  }
  return best;
}

History random_history(const Fixture& f, const ChannelParams& truth,
                       long steps, double sigma, beamalign::Rng& rng) {
  History h;
  std::uniform_int_distribution<int> beam(0, f.num_beams - 1);
  std::normal_distribution<double> noise(0.0, sigma);
  for (long t = 1; t <= steps; ++t) {
    const int a = beam(rng);
    double r = beamalign::expected_reward(truth, a, f.patterns);
    if (sigma > 0.0) r += noise(rng);
    h.append(Observation{t, a, r});
  }
  return h;
}

}  // namespace

TEST_CASE("history enforces strictly increasing steps") {
  History h;
  h.append(Observation{1, 0, 1.0});
  h.append(Observation{5, 1, 2.0});
  CHECK(h.size() == 2);
  CHECK_THROWS_AS(h.append(Observation{5, 0, 0.0}), std::runtime_error);
  CHECK_THROWS_AS(h.append(Observation{4, 0, 0.0}), std::runtime_error);
  CHECK_THROWS_AS(h.append(Observation{6, -1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(h.append(Observation{6, 0, std::nan("")}),
                  std::invalid_argument);
}

TEST_CASE("candidate space enumerates sorted angle tuples times all gains") {
  ParameterGrid grid;
  grid.thetas_rad = {0.1, 0.2, 0.3};
  grid.gains = {cplx{1, 0}, cplx{2, 0}};

  SUBCASE("single path") {
    const CandidateSpace space(grid, 1);
    CHECK(space.num_theta_tuples() == 3);
    CHECK(space.gains_per_tuple() == 2);
    CHECK(space.num_candidates() == 6);
    int ti = 0, gi = 0;
    space.decode(0, &ti, &gi);
    CHECK(ti == 0);
    CHECK(gi == 0);
    space.decode(5, &ti, &gi);
    CHECK(ti == 2);
    CHECK(gi == 1);
  }
  SUBCASE("two paths collapse angle permutations") {
    const CandidateSpace space(grid, 2);
    // Nondecreasing pairs over 3 angles: (0,0) (0,1) (0,2) (1,1) (1,2) (2,2).
    CHECK(space.num_theta_tuples() == 6);
    CHECK(space.gains_per_tuple() == 4);
    CHECK(space.num_candidates() == 24);
    int ti[2], gi[2];
    std::vector<std::pair<int, int>> seen;
    for (long c = 0; c < space.num_candidates(); c += 4) {
      space.decode(c, ti, gi);
      CHECK(ti[0] <= ti[1]);
      seen.emplace_back(ti[0], ti[1]);
    }
    const std::vector<std::pair<int, int>> want = {{0, 0}, {0, 1}, {0, 2},
                                                   {1, 1}, {1, 2}, {2, 2}};
    CHECK(seen == want);
    // Gain indices run over the full product, last path fastest.
    space.decode(1, ti, gi);
    CHECK(gi[0] == 0);
    CHECK(gi[1] == 1);
    space.decode(2, ti, gi);
    CHECK(gi[0] == 1);
    CHECK(gi[1] == 0);
  }
  SUBCASE("params and index_of round-trip every candidate") {
    const CandidateSpace space(grid, 2);
    for (long c = 0; c < space.num_candidates(); ++c) {
      CHECK(space.index_of(space.params(c)) == c);
    }
    CHECK(space.index_of(ChannelParams({0.15, 0.2}, {cplx{1, 0}, cplx{2, 0}})) ==
          -1);
    CHECK(space.index_of(ChannelParams({0.1, 0.2}, {cplx{7, 0}, cplx{2, 0}})) ==
          -1);
    CHECK(space.index_of(ChannelParams({0.1}, {cplx{1, 0}})) == -1);
  }
}

TEST_CASE("predicted reward is bit-identical to the channel model") {
  const Fixture f = small_fixture(5, 3, 8);
  const CandidateSpace space(f.grid, 2);
  for (long c = 0; c < space.num_candidates(); ++c) {
    const ChannelParams p = space.params(c);
    for (int a = 0; a < f.num_beams; ++a) {
      CHECK(space.predicted_reward(c, a, f.patterns) ==
            beamalign::expected_reward(p, a, f.patterns));
    }
  }
}

TEST_CASE("sse accumulates squared prediction errors in step order") {
  const Fixture f = small_fixture(4, 2, 8);
  const ChannelParams cand({f.grid.thetas_rad[1]}, {f.grid.gains[0]});

  SUBCASE("own noiseless observations give exactly zero") {
    History h;
    for (long t = 1; t <= 10; ++t) {
      const int a = static_cast<int>(t % f.num_beams);
      h.append(Observation{t, a, beamalign::expected_reward(cand, a, f.patterns)});
    }
    CHECK(beamalign::sse(cand, h, f.patterns) == 0.0);
  }
  SUBCASE("single observation gives the squared residual") {
    History h;
    const double pred = beamalign::expected_reward(cand, 3, f.patterns);
    h.append(Observation{1, 3, pred + 2.5});
    CHECK(beamalign::sse(cand, h, f.patterns) == 2.5 * 2.5);
  }
  SUBCASE("random history matches a naive loop") {
    beamalign::Rng rng(11);
    const ChannelParams truth({f.grid.thetas_rad[2]}, {f.grid.gains[1]});
    const History h = random_history(f, truth, 25, 2.0, rng);
    double want = 0.0;
    for (const auto& obs : h.observations()) {
      const double d =
          beamalign::expected_reward(cand, obs.beam, f.patterns) - obs.reward_dbm;
      want += d * d;
    }
    CHECK(beamalign::sse(cand, h, f.patterns) == want);
  }
}

TEST_CASE("least-squares fit equals an independent exhaustive minimizer") {
  const Fixture f = small_fixture(8, 4, 8);
  beamalign::Rng rng(2024);
  std::uniform_int_distribution<std::size_t> theta_pick(0, 7), gain_pick(0, 3);
  std::uniform_int_distribution<long> len(1, 30);

  const CandidateSpace space(f.grid, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const ChannelParams truth({f.grid.thetas_rad[theta_pick(rng)]},
                              {f.grid.gains[gain_pick(rng)]});
    const History h = random_history(f, truth, len(rng), 3.6, rng);
    const auto fit = beamalign::mle_fit_detailed(h, space, f.patterns);
    const auto want = brute_force_k1(h, f.grid, f.patterns);
    // Candidate c = theta_idx * |B| + gain_idx for one path.
    CHECK(fit.candidate_index ==
          static_cast<long>(want.theta_idx * 4 + want.gain_idx));
    CHECK(fit.sse == want.sse);
  }
}

TEST_CASE("noiseless on-grid truth is recovered exactly") {
  const Fixture f = small_fixture(6, 3, 16);
  const ChannelParams truth({f.grid.thetas_rad[4]}, {f.grid.gains[2]});
  History h;
  for (long t = 1; t <= 16; ++t) {
    const int a = static_cast<int>(t - 1);
    h.append(Observation{t, a, beamalign::expected_reward(truth, a, f.patterns)});
  }
  const ChannelParams fit = beamalign::mle_fit(h, f.grid, 1, f.patterns);
  CHECK(fit.thetas_rad() == truth.thetas_rad());
  CHECK(fit.betas() == truth.betas());
  const CandidateSpace space(f.grid, 1);
  const auto detailed = beamalign::mle_fit_detailed(h, space, f.patterns);
  CHECK(detailed.sse == 0.0);
}

TEST_CASE("fit rejects empty histories and bad beams") {
  const Fixture f = small_fixture(3, 2, 4);
  const CandidateSpace space(f.grid, 1);
  History empty;
  CHECK_THROWS_AS(beamalign::mle_fit_detailed(empty, space, f.patterns),
                  std::runtime_error);
  History bad;
  bad.append(Observation{1, 7, 1.0});
  CHECK_THROWS_AS(beamalign::mle_fit_detailed(bad, space, f.patterns),
                  std::invalid_argument);
}

TEST_CASE("incremental estimator equals the batch fit after every update") {
  const Fixture f = small_fixture(6, 3, 8);
  beamalign::Rng rng(555);
  std::uniform_int_distribution<std::size_t> theta_pick(0, 5), gain_pick(0, 2);

  for (int trial = 0; trial < 8; ++trial) {
    const ChannelParams truth({f.grid.thetas_rad[theta_pick(rng)]},
                              {f.grid.gains[gain_pick(rng)]});
    EstimatorState state(f.grid, 1, f.patterns);
    const CandidateSpace space(f.grid, 1);
    History h;
    std::uniform_int_distribution<int> beam(0, f.num_beams - 1);
    std::normal_distribution<double> noise(0.0, 3.6);
    for (long t = 1; t <= 50; ++t) {
      const int a = beam(rng);
      const double r =
          beamalign::expected_reward(truth, a, f.patterns) + noise(rng);
      const Observation obs{t, a, r};
      h.append(obs);
      state.update(obs);
      const auto batch = beamalign::mle_fit_detailed(h, space, f.patterns);
      REQUIRE(state.best_candidate() == batch.candidate_index);
      REQUIRE(state.best_sse() == batch.sse);
    }
  }
}

TEST_CASE("estimator bookkeeping") {
  const Fixture f = small_fixture(4, 2, 4);
  EstimatorState state(f.grid, 1, f.patterns);

  SUBCASE("no observations means no estimate") {
    CHECK(state.num_observations() == 0);
    CHECK_THROWS_AS(state.best_candidate(), std::runtime_error);
    CHECK_THROWS_AS(state.best_sse(), std::runtime_error);
  }
  SUBCASE("first update ranks candidates by single-point error") {
    state.update(Observation{1, 2, 10.0});
    const auto& space = state.space();
    long want = 0;
    double best = std::numeric_limits<double>::infinity();
    for (long c = 0; c < space.num_candidates(); ++c) {
      const double d = space.predicted_reward(c, 2, f.patterns) - 10.0;
      if (d * d < best) {
        best = d * d;
        want = c;
      }
    }
    CHECK(state.best_candidate() == want);
  }
  SUBCASE("out-of-order updates are rejected") {
    state.update(Observation{3, 0, 1.0});
    CHECK_THROWS_AS(state.update(Observation{3, 0, 1.0}), std::runtime_error);
    CHECK_THROWS_AS(state.update(Observation{2, 0, 1.0}), std::runtime_error);
  }
  SUBCASE("per-candidate sse never decreases") {
    beamalign::Rng rng(9);
    std::uniform_int_distribution<int> beam(0, 3);
    std::normal_distribution<double> noise(0.0, 5.0);
    std::vector<double> prev(static_cast<std::size_t>(state.space().num_candidates()), 0.0);
    for (long t = 1; t <= 30; ++t) {
      state.update(Observation{t, beam(rng), noise(rng)});
      for (long c = 0; c < state.space().num_candidates(); ++c) {
        const double now = state.candidate_sse(c);
        CHECK(now >= prev[static_cast<std::size_t>(c)]);
        prev[static_cast<std::size_t>(c)] = now;
      }
    }
  }
  SUBCASE("an exactly predicted observation leaves the best sse unchanged") {
    state.update(Observation{1, 1, 7.0});
    const long best = state.best_candidate();
    const double sse_before = state.best_sse();
    const double pred = state.space().predicted_reward(best, 3, f.patterns);
    state.update(Observation{2, 3, pred});
    CHECK(state.candidate_sse(best) == sse_before);
  }
  SUBCASE("reset forgets the data") {
    state.update(Observation{1, 0, 3.0});
    state.reset();
    CHECK(state.num_observations() == 0);
    CHECK_THROWS_AS(state.best_candidate(), std::runtime_error);
    state.update(Observation{1, 0, 3.0});
    CHECK(state.num_observations() == 1);
  }
}

TEST_CASE("predicted best beam agrees with the channel argmax") {
  const Fixture f = small_fixture(5, 2, 8);
  for (std::size_t j = 0; j < f.grid.thetas_rad.size(); ++j) {
    const ChannelParams p({f.grid.thetas_rad[j]}, {f.grid.gains[1]});
    int want = 0;
    double best = -1e300;
    for (int a = 0; a < f.num_beams; ++a) {
      const double r = beamalign::expected_reward(p, a, f.patterns);
      if (r > best) {
        best = r;
        want = a;
      }
    }
    CHECK(beamalign::predict_best_beam(p, f.patterns) == want);
  }
}

TEST_CASE("two-path fits find a zero-error candidate on noiseless data") {
  const Fixture f = small_fixture(4, 2, 8);
  const CandidateSpace space(f.grid, 2);
  const ChannelParams truth({f.grid.thetas_rad[0], f.grid.thetas_rad[3]},
                            {f.grid.gains[1], f.grid.gains[0]});
  REQUIRE(space.index_of(truth) >= 0);
  History h;
  for (long t = 1; t <= 8; ++t) {
    const int a = static_cast<int>(t - 1);
    h.append(Observation{t, a, beamalign::expected_reward(truth, a, f.patterns)});
  }
  const auto fit = beamalign::mle_fit_detailed(h, space, f.patterns);
  CHECK(fit.sse == 0.0);
  // The truth candidate attains zero, so the winner's error is zero too.
  const ChannelParams winner = space.params(fit.candidate_index);
  for (int a = 0; a < f.num_beams; ++a)
    CHECK(beamalign::expected_reward(winner, a, f.patterns) ==
          beamalign::expected_reward(truth, a, f.patterns));
}
