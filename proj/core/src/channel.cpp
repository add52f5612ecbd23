#include "beamalign/channel.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace beamalign {

ChannelParams::ChannelParams(std::vector<double> thetas_rad,
                             std::vector<cplx> betas) {
  if (thetas_rad.empty()) {
    throw std::invalid_argument("channel params: at least one path required");
  }
  if (thetas_rad.size() != betas.size()) {
    throw std::invalid_argument("channel params: theta/beta length mismatch");
  }
  for (double th : thetas_rad) {
    if (!std::isfinite(th)) {
      throw std::invalid_argument("channel params: angles must be finite");
    }
  }
  // Stable sort by angle keeps gain pairing and makes equal-angle order
  // deterministic.
  std::vector<std::size_t> order(thetas_rad.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return thetas_rad[a] < thetas_rad[b];
                   });
  thetas_rad_.reserve(order.size());
  betas_.reserve(order.size());
  for (std::size_t i : order) {
    thetas_rad_.push_back(thetas_rad[i]);
    betas_.push_back(betas[i]);
  }
}

void validate(const ParameterGrid& grid) {
  if (grid.thetas_rad.empty()) {
    throw std::invalid_argument("parameter grid: angle grid must be non-empty");
  }
  if (grid.gains.empty()) {
    throw std::invalid_argument("parameter grid: gain grid must be non-empty");
  }
  for (std::size_t j = 1; j < grid.thetas_rad.size(); ++j) {
    if (!(grid.thetas_rad[j] > grid.thetas_rad[j - 1])) {
      throw std::invalid_argument(
          "parameter grid: angle grid must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < grid.gains.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.gains.size(); ++j) {
      if (grid.gains[i] == grid.gains[j]) {
        throw std::invalid_argument("parameter grid: duplicate gain entries");
      }
    }
  }
}

void validate(const NoiseModel& noise) {
  if (!(noise.sigma_dbm >= 0.0) || !std::isfinite(noise.sigma_dbm)) {
    throw std::invalid_argument("noise model: sigma must be >= 0");
  }
}

namespace {

template <typename Patterns>
cplx response_impl(const ChannelParams& params, int beam,
                   const Patterns& patterns) {
  cplx acc(0.0, 0.0);
  const auto& thetas = params.thetas_rad();
  const auto& betas = params.betas();
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    acc += betas[i] * patterns(beam, thetas[i]);
  }
  return acc;
}

}  // namespace

cplx channel_response(const ChannelParams& params, int beam,
                      const PatternMatrix& patterns) {
  if (beam < 0 || beam >= patterns.num_beams) {
    throw std::invalid_argument("channel_response: beam index out of range");
  }
  return response_impl(params, beam, [&](int a, double th) {
    return patterns.entry(a, patterns.index_of(th));
  });
}

cplx channel_response(const ChannelParams& params, int beam,
                      const Codebook& codebook) {
  if (beam < 0 || beam >= codebook.num_beams()) {
    throw std::invalid_argument("channel_response: beam index out of range");
  }
  return response_impl(params, beam,
                       [&](int a, double th) { return codebook.gain(a, th); });
}

double expected_reward(const ChannelParams& params, int beam,
                       const PatternMatrix& patterns) {
  return reward_dbm_from_response(channel_response(params, beam, patterns));
}

double expected_reward(const ChannelParams& params, int beam,
                       const Codebook& codebook) {
  return reward_dbm_from_response(channel_response(params, beam, codebook));
}

double sample_reward(const ChannelParams& params, int beam,
                     const PatternMatrix& patterns, const NoiseModel& noise,
                     Rng& rng) {
  validate(noise);
  const double r = expected_reward(params, beam, patterns);
  if (noise.sigma_dbm == 0.0) return r;
  std::normal_distribution<double> dist(0.0, noise.sigma_dbm);
  return r + dist(rng);
}

namespace {

template <typename RewardFn>
int argmax_beam(int num_beams, RewardFn reward) {
  int best = 0;
  double best_r = reward(0);
  for (int a = 1; a < num_beams; ++a) {
    const double r = reward(a);
    if (r > best_r) {
      best_r = r;
      best = a;
    }
  }
  return best;
}

}  // namespace

int best_beam(const ChannelParams& params, const PatternMatrix& patterns) {
  return argmax_beam(patterns.num_beams,
                     [&](int a) { return expected_reward(params, a, patterns); });
}

int best_beam(const ChannelParams& params, const Codebook& codebook) {
  return argmax_beam(codebook.num_beams(),
                     [&](int a) { return expected_reward(params, a, codebook); });
}

std::optional<GridPreset> grid_preset_from_string(const std::string& name) {
  if (name == "deepmimo-like") return GridPreset::deepmimo_like;
  if (name == "deepsense-like") return GridPreset::deepsense_like;
  return std::nullopt;
}

ParameterGrid make_default_grids(GridPreset preset) {
  GridSpec spec;
  switch (preset) {
    case GridPreset::deepmimo_like:
      spec.theta_span = GridSpec::LinearSpan{0.0, 2.0, 181};
      spec.gain_span = GridSpec::LogSpan{-10.0, 0.5, 21};
      break;
    case GridPreset::deepsense_like:
      spec.theta_span = GridSpec::LinearSpan{0.0, 2.0, 111};
      spec.gain_span = GridSpec::LogSpan{-3.0, 0.2, 14};
      break;
  }
  return make_default_grids(spec);
}

ParameterGrid make_default_grids(const GridSpec& spec) {
  ParameterGrid grid;
  if (!spec.theta_list_deg.empty()) {
    if (spec.theta_span) {
      throw std::invalid_argument(
          "grid spec: give either an angle list or an angle span, not both");
    }
    for (double deg : spec.theta_list_deg) {
      grid.thetas_rad.push_back(deg_to_rad(deg));
    }
  } else if (spec.theta_span) {
    if (spec.theta_span->count < 1) {
      throw std::invalid_argument("grid spec: angle span count must be >= 1");
    }
    for (int i = 0; i < spec.theta_span->count; ++i) {
      grid.thetas_rad.push_back(
          deg_to_rad(spec.theta_span->start_deg + spec.theta_span->step_deg * i));
    }
  } else {
    throw std::invalid_argument("grid spec: no angle grid given");
  }

  std::vector<double> magnitudes;
  if (!spec.gain_list.empty()) {
    if (spec.gain_span) {
      throw std::invalid_argument(
          "grid spec: give either a gain list or a gain span, not both");
    }
    magnitudes = spec.gain_list;
  } else if (spec.gain_span) {
    if (spec.gain_span->count < 1) {
      throw std::invalid_argument("grid spec: gain span count must be >= 1");
    }
    for (int i = 0; i < spec.gain_span->count; ++i) {
      magnitudes.push_back(
          std::exp(spec.gain_span->log_start + spec.gain_span->log_step * i));
    }
  } else {
    throw std::invalid_argument("grid spec: no gain grid given");
  }

  if (spec.gain_phases_deg.empty()) {
    for (double m : magnitudes) grid.gains.push_back(cplx(m, 0.0));
  } else {
    for (double m : magnitudes) {
      for (double ph : spec.gain_phases_deg) {
        const double rad = deg_to_rad(ph);
        grid.gains.push_back(m * cplx(std::cos(rad), std::sin(rad)));
      }
    }
  }

  validate(grid);
  return grid;
}

}  // namespace beamalign
