#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "beamalign/analysis.hpp"
#include "beamalign/rng.hpp"
#include "test_support.hpp"

using beamalign::CandidateSpace;
using beamalign::ChannelParams;
using beamalign::cplx;
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
    f.grid.gains.emplace_back(0.4 * static_cast<double>(i + 1), 0.0);
  f.patterns = beamalign::pattern_matrix(
      beamalign::dft_codebook(make_geometry(num_beams), num_beams),
      f.grid.thetas_rad);
  f.num_beams = num_beams;
  return f;
}

// Oracle pieces for the assumption re-scans, written from the definitions.
double theta_norm_sq(const ChannelParams& a, const ChannelParams& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.thetas_rad().size(); ++i) {
    const double d = a.thetas_rad()[i] - b.thetas_rad()[i];
    s += d * d;
  }
  return s;
}

double log_gain_norm_sq(const ChannelParams& a, const ChannelParams& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.betas().size(); ++i) {
    const double d = std::log(a.betas()[i].real()) - std::log(b.betas()[i].real());
    s += d * d;
  }
  return s;
}

}  // namespace

TEST_CASE("the fit lattice is zero plus quarter-decade powers of ten") {
  const auto lattice = beamalign::assumption_fit_lattice();
  REQUIRE(lattice.size() == 50);
  CHECK(lattice[0] == 0.0);
  CHECK(lattice[1] == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK(lattice[49] == doctest::Approx(1e6).epsilon(1e-12));
  for (std::size_t i = 2; i < lattice.size(); ++i)
    CHECK(lattice[i] / lattice[i - 1] ==
          doctest::Approx(std::pow(10.0, 0.25)).epsilon(1e-9));
}

TEST_CASE("reward-gap lower bound fit survives an independent re-scan") {
  const Fixture f = small_fixture(6, 3, 16);
  const ChannelParams truth({f.grid.thetas_rad[3]}, {f.grid.gains[1]});
  const auto fit = beamalign::fit_assumption2(truth, f.grid, f.patterns);
  REQUIRE(fit.feasible);
  CHECK(fit.first > 0.0);

  const CandidateSpace space(f.grid, 1);
  for (long c = 0; c < space.num_candidates(); ++c) {
    const ChannelParams cand = space.params(c);
    double gap_sq = 0.0;
    for (int a = 0; a < f.num_beams; ++a) {
      const double d = beamalign::expected_reward(truth, a, f.patterns) -
                       beamalign::expected_reward(cand, a, f.patterns);
      gap_sq += d * d;
    }
    gap_sq /= static_cast<double>(f.num_beams);
    CHECK(fit.first * theta_norm_sq(truth, cand) +
              fit.second * log_gain_norm_sq(truth, cand) <=
          gap_sq);
  }
}

TEST_CASE("reward-gap upper bound fit survives an independent re-scan") {
  const Fixture f = small_fixture(6, 3, 16);
  const ChannelParams truth({f.grid.thetas_rad[3]}, {f.grid.gains[1]});
  const auto fit = beamalign::fit_assumption3(truth, f.grid, f.patterns);
  REQUIRE(fit.feasible);

  const CandidateSpace space(f.grid, 1);
  for (long c = 0; c < space.num_candidates(); ++c) {
    const ChannelParams cand = space.params(c);
    double max_gap = 0.0;
    for (int a = 0; a < f.num_beams; ++a) {
      const double d = std::abs(beamalign::expected_reward(truth, a, f.patterns) -
                                beamalign::expected_reward(cand, a, f.patterns));
      max_gap = std::max(max_gap, d);
    }
    CHECK(max_gap <= fit.first * std::sqrt(theta_norm_sq(truth, cand)) +
                         fit.second * std::sqrt(log_gain_norm_sq(truth, cand)));
  }
}

TEST_CASE("lower bound fit maximizes and upper bound fit minimizes") {
  const Fixture f = small_fixture(5, 2, 8);
  const ChannelParams truth({f.grid.thetas_rad[2]}, {f.grid.gains[0]});
  const auto lower = beamalign::fit_assumption2(truth, f.grid, f.patterns);
  const auto upper = beamalign::fit_assumption3(truth, f.grid, f.patterns);
  REQUIRE(lower.feasible);
  REQUIRE(upper.feasible);
  const auto lattice = beamalign::assumption_fit_lattice();

  // A strictly larger lower-bound pair on the lattice must violate somewhere.
  const CandidateSpace space(f.grid, 1);
  auto lower_holds = [&](double c1, double c2) {
    for (long c = 0; c < space.num_candidates(); ++c) {
      const ChannelParams cand = space.params(c);
      double gap_sq = 0.0;
      for (int a = 0; a < f.num_beams; ++a) {
        const double d = beamalign::expected_reward(truth, a, f.patterns) -
                         beamalign::expected_reward(cand, a, f.patterns);
        gap_sq += d * d;
      }
      gap_sq /= static_cast<double>(f.num_beams);
      if (c1 * theta_norm_sq(truth, cand) +
              c2 * log_gain_norm_sq(truth, cand) >
          gap_sq)
        return false;
    }
    return true;
  };
  for (double c1 : lattice) {
    for (double c2 : lattice) {
      if (c1 + c2 > lower.first + lower.second) CHECK_FALSE(lower_holds(c1, c2));
    }
  }
  auto upper_holds = [&](double c3, double c4) {
    for (long c = 0; c < space.num_candidates(); ++c) {
      const ChannelParams cand = space.params(c);
      for (int a = 0; a < f.num_beams; ++a) {
        const double d =
            std::abs(beamalign::expected_reward(truth, a, f.patterns) -
                     beamalign::expected_reward(cand, a, f.patterns));
        if (d > c3 * std::sqrt(theta_norm_sq(truth, cand)) +
                    c4 * std::sqrt(log_gain_norm_sq(truth, cand)))
          return false;
      }
    }
    return true;
  };
  for (double c3 : lattice) {
    for (double c4 : lattice) {
      if (c3 + c4 < upper.first + upper.second) CHECK_FALSE(upper_holds(c3, c4));
    }
  }
}

TEST_CASE("assumption fits validate their inputs") {
  const Fixture f = small_fixture(4, 2, 8);

  SUBCASE("off-grid truth is rejected") {
    const ChannelParams off({0.1234}, {f.grid.gains[0]});
    CHECK_THROWS_AS(beamalign::fit_assumption2(off, f.grid, f.patterns),
                    std::invalid_argument);
    CHECK_THROWS_AS(beamalign::fit_assumption3(off, f.grid, f.patterns),
                    std::invalid_argument);
  }
  SUBCASE("complex or nonpositive gains have no log norm") {
    ParameterGrid bad = f.grid;
    bad.gains[1] = cplx{0.5, 0.5};
    const ChannelParams truth({bad.thetas_rad[0]}, {bad.gains[0]});
    CHECK_THROWS_AS(beamalign::fit_assumption2(truth, bad, f.patterns),
                    std::invalid_argument);
    bad.gains[1] = cplx{-0.5, 0.0};
    CHECK_THROWS_AS(beamalign::fit_assumption3(truth, bad, f.patterns),
                    std::invalid_argument);
  }
}

TEST_CASE("an all-floored grid defeats the lower bound fit") {
  // Every candidate's response lands below the power floor, so all rewards
  // tie at the floor and every reward gap is zero while the parameter
  // norms stay positive: no positive pair can hold.
  Fixture f;
  f.grid.thetas_rad = testsupport::spread_angles_rad(3, 30.0, 90.0);
  f.grid.gains = {cplx{1e-20, 0.0}, cplx{1e-19, 0.0}};
  f.patterns = beamalign::pattern_matrix(
      beamalign::dft_codebook(make_geometry(2), 2), f.grid.thetas_rad);
  f.num_beams = 2;
  const ChannelParams truth({f.grid.thetas_rad[0]}, {f.grid.gains[0]});
  const auto fit = beamalign::fit_assumption2(truth, f.grid, f.patterns);
  CHECK_FALSE(fit.feasible);
  CHECK(fit.first == 0.0);
  CHECK(fit.second == 0.0);
  CHECK(fit.worst_candidate >= 0);

  // The upper bound, by contrast, is satisfied with the all-zero pair.
  const auto upper = beamalign::fit_assumption3(truth, f.grid, f.patterns);
  CHECK(upper.feasible);
  CHECK(upper.first == 0.0);
  CHECK(upper.second == 0.0);
}

TEST_CASE("a synthetic cliff defeats the upper bound fit") {
  // Two nearly identical angles whose hand-built pattern rewards differ by
  // hundreds of dB: no lattice pair can cover the cliff.
  PatternMatrix pm;
  pm.theta_grid_rad = {1.0, 1.0 + 1e-9};
  pm.num_beams = 1;
  pm.entries = {cplx{1.0, 0.0}, cplx{1e20, 0.0}};
  ParameterGrid grid;
  grid.thetas_rad = pm.theta_grid_rad;
  grid.gains = {cplx{1.0, 0.0}};
  const ChannelParams truth({1.0}, {cplx{1.0, 0.0}});
  const auto fit = beamalign::fit_assumption3(truth, grid, pm);
  CHECK_FALSE(fit.feasible);
  CHECK(fit.worst_candidate >= 0);
  CHECK(fit.worst_lhs > fit.worst_rhs);
}

TEST_CASE("theoretical explore length") {
  SUBCASE("worked value: T=200, unit noise, unit log grid sizes") {
    // T^(2/3) * (1 * 1 * (ln e + ln 1))^(1/3) = 200^(2/3) = 34.19..., so 35.
    CHECK(beamalign::theoretical_m(200, 1, 1.0, std::exp(1.0), 1.0) == 35);
  }
  SUBCASE("clamps to [1, T]") {
    CHECK(beamalign::theoretical_m(200, 1, 1e-9, 2.0, 2.0) == 1);
    CHECK(beamalign::theoretical_m(50, 1, 100.0, 21.0, 181.0) == 50);
    CHECK(beamalign::theoretical_m(1, 1, 1.0, 2.0, 2.0) == 1);
  }
  SUBCASE("monotone in horizon, paths, noise, and grid sizes") {
    const long base = beamalign::theoretical_m(1000, 1, 2.0, 21.0, 181.0);
    CHECK(beamalign::theoretical_m(4000, 1, 2.0, 21.0, 181.0) >= base);
    CHECK(beamalign::theoretical_m(1000, 2, 2.0, 21.0, 181.0) >= base);
    CHECK(beamalign::theoretical_m(1000, 1, 3.0, 21.0, 181.0) >= base);
    CHECK(beamalign::theoretical_m(1000, 1, 2.0, 42.0, 181.0) >= base);
  }
  SUBCASE("full-scale values used by the scaling experiment") {
    CHECK(beamalign::theoretical_m(500, 1, 3.6, 21.0, 181.0) == 299);
    CHECK(beamalign::theoretical_m(4000, 1, 3.6, 21.0, 181.0) == 1196);
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(beamalign::theoretical_m(0, 1, 1.0, 2.0, 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(beamalign::theoretical_m(10, 0, 1.0, 2.0, 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(beamalign::theoretical_m(10, 1, -1.0, 2.0, 2.0),
                    std::invalid_argument);
  }
}

TEST_CASE("concentration coverage") {
  const Fixture f = small_fixture(8, 4, 8);
  const ChannelParams truth({f.grid.thetas_rad[5]}, {f.grid.gains[2]});

  SUBCASE("noiseless data satisfies the sandwich in every trial") {
    beamalign::Rng rng(404);
    const double coverage = beamalign::concentration_check(
        truth, f.grid, f.patterns, 30, 0.1, 0.0, 50, rng);
    CHECK(coverage == 1.0);
  }
  SUBCASE("noisy coverage respects the failure budget") {
    beamalign::Rng rng(808);
    const long trials = 200;
    const double delta = 0.1;
    const double coverage = beamalign::concentration_check(
        truth, f.grid, f.patterns, 30, delta, 1.0, trials, rng);
    // Allow three binomial standard deviations below the guarantee.
    const double slack = 3.0 * std::sqrt(delta * (1.0 - delta) /
                                         static_cast<double>(trials));
    CHECK(coverage >= 1.0 - delta - slack);
    CHECK(coverage <= 1.0);
  }
  SUBCASE("inputs are validated") {
    beamalign::Rng rng(1);
    const ChannelParams off({0.222}, {f.grid.gains[0]});
    CHECK_THROWS_AS(beamalign::concentration_check(off, f.grid, f.patterns, 30,
                                                   0.1, 1.0, 10, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(beamalign::concentration_check(truth, f.grid, f.patterns,
                                                   0, 0.1, 1.0, 10, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(beamalign::concentration_check(truth, f.grid, f.patterns,
                                                   30, 0.0, 1.0, 10, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(beamalign::concentration_check(truth, f.grid, f.patterns,
                                                   30, 0.1, 1.0, 0, rng),
                    std::invalid_argument);
  }
}

TEST_CASE("reward boundedness scan") {
  const Fixture f = small_fixture(6, 3, 16);

  SUBCASE("a desk-scale grid satisfies the published bound") {
    const auto check = beamalign::check_reward_bound(
        f.grid, 1, f.patterns, beamalign::kDefaultRewardBoundDbm);
    CHECK(check.holds);
    CHECK(check.max_abs_reward > 0.0);
    CHECK(check.max_abs_reward <= 70.0);
  }
  SUBCASE("the reported maximum is attained by some candidate and beam") {
    const auto check = beamalign::check_reward_bound(f.grid, 1, f.patterns, 70.0);
    const CandidateSpace space(f.grid, 1);
    double want = 0.0;
    for (long c = 0; c < space.num_candidates(); ++c) {
      const ChannelParams cand = space.params(c);
      for (int a = 0; a < f.num_beams; ++a)
        want = std::max(want,
                        std::abs(beamalign::expected_reward(cand, a, f.patterns)));
    }
    CHECK(check.max_abs_reward == want);
  }
  SUBCASE("a tight bound fails the scan") {
    const auto check = beamalign::check_reward_bound(f.grid, 1, f.patterns, 1.0);
    CHECK_FALSE(check.holds);
  }
}
