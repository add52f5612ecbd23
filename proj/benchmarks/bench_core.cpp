// Microbenchmarks for the hot paths at full experiment scale: a 180-beam
// codebook over the 181x21 default grid.
#include <benchmark/benchmark.h>

#include <random>

#include "beamalign/array.hpp"
#include "beamalign/channel.hpp"
#include "beamalign/environment.hpp"
#include "beamalign/estimation.hpp"
#include "beamalign/policies.hpp"
#include "beamalign/rng.hpp"

using namespace beamalign;

namespace {

struct Scale {
  Codebook codebook;
  ParameterGrid grid;
  PatternMatrix patterns;
  ChannelParams truth;

  Scale()
      : codebook(dft_codebook(ArrayGeometry{16, 0.005, 0.011}, 180)),
        grid(make_default_grids(GridPreset::deepmimo_like)),
        patterns(pattern_matrix(codebook, grid.thetas_rad)),
        truth({deg_to_rad(72.0)}, {cplx{1.0, 0.0}}) {}
};

const Scale& scale() {
  static const Scale s;
  return s;
}

History noisy_history(long length, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> beam(0, 179);
  std::normal_distribution<double> noise(0.0, 3.6);
  History history;
  for (long t = 1; t <= length; ++t) {
    const int a = beam(rng);
    history.append(Observation{
        t, a, expected_reward(scale().truth, a, scale().patterns) + noise(rng)});
  }
  return history;
}

void bm_pattern_build(benchmark::State& state) {
  const Codebook codebook = dft_codebook(ArrayGeometry{16, 0.005, 0.011}, 180);
  const ParameterGrid grid = make_default_grids(GridPreset::deepmimo_like);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pattern_matrix(codebook, grid.thetas_rad));
  }
}
BENCHMARK(bm_pattern_build);

void bm_batch_fit(benchmark::State& state) {
  const History history = noisy_history(state.range(0), 7);
  const CandidateSpace space(scale().grid, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mle_fit_detailed(history, space, scale().patterns));
  }
}
BENCHMARK(bm_batch_fit)->Arg(299)->Arg(1196);

void bm_estimator_update(benchmark::State& state) {
  EstimatorState estimator(scale().grid, 1, scale().patterns);
  Rng rng = make_rng(13);
  std::uniform_int_distribution<int> beam(0, 179);
  std::normal_distribution<double> noise(0.0, 3.6);
  long step = 0;
  for (auto _ : state) {
    const int a = beam(rng);
    estimator.update(Observation{
        ++step, a, expected_reward(scale().truth, a, scale().patterns) + noise(rng)});
    benchmark::DoNotOptimize(estimator.best_candidate());
  }
}
BENCHMARK(bm_estimator_update);

void bm_greedy_step(benchmark::State& state) {
  PrGreedyPolicy policy(scale().grid, 1, scale().patterns, std::nullopt, 17);
  const StationaryEnv env(scale().truth, scale().codebook, NoiseModel{3.6});
  Rng env_rng = make_rng(19);
  long step = 0;
  for (auto _ : state) {
    ++step;
    const int a = policy.select(step);
    policy.observe(step, a, env.sample(step - 1, a, env_rng));
  }
}
BENCHMARK(bm_greedy_step);

void bm_reward_sample(benchmark::State& state) {
  const NoiseModel noise{3.6};
  Rng rng = make_rng(23);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_reward(scale().truth, 90, scale().patterns, noise, rng));
  }
}
BENCHMARK(bm_reward_sample);

}  // namespace

BENCHMARK_MAIN();
