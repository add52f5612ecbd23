#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "beamalign/array.hpp"
#include "beamalign/rng.hpp"

namespace beamalign {

inline constexpr double kRewardFloorDbm = -300.0;
inline constexpr double kPowerFloor = 1e-33;

inline double squared_magnitude(cplx h) {
  return h.real() * h.real() + h.imag() * h.imag();
}

// dBm reward of a complex channel response, floored so exact cancellation
// stays finite.
inline double reward_dbm_from_response(cplx h) {
  const double p = squared_magnitude(h);
  if (p < kPowerFloor) return kRewardFloorDbm;
  return 30.0 + 10.0 * std::log10(p);
}

// One k-path channel: per-path angle (radians) and complex gain.
// Paths are kept sorted by angle so parameter sets have one representation.
class ChannelParams {
 public:
  ChannelParams(std::vector<double> thetas_rad, std::vector<cplx> betas);

  int num_paths() const { return static_cast<int>(thetas_rad_.size()); }
  const std::vector<double>& thetas_rad() const { return thetas_rad_; }
  const std::vector<cplx>& betas() const { return betas_; }

 private:
  std::vector<double> thetas_rad_;
  std::vector<cplx> betas_;
};

// The finite candidate sets the estimator searches over.
struct ParameterGrid {
  std::vector<double> thetas_rad;  // strictly increasing
  std::vector<cplx> gains;         // nonempty, no duplicates

  std::size_t num_angles() const { return thetas_rad.size(); }
  std::size_t num_gains() const { return gains.size(); }
};

void validate(const ParameterGrid& grid);

struct NoiseModel {
  double sigma_dbm = 0.0;  // >= 0; 0 means noiseless
};

void validate(const NoiseModel& noise);

cplx channel_response(const ChannelParams& params, int beam,
                      const PatternMatrix& patterns);
cplx channel_response(const ChannelParams& params, int beam,
                      const Codebook& codebook);

double expected_reward(const ChannelParams& params, int beam,
                       const PatternMatrix& patterns);
double expected_reward(const ChannelParams& params, int beam,
                       const Codebook& codebook);

double sample_reward(const ChannelParams& params, int beam,
                     const PatternMatrix& patterns, const NoiseModel& noise,
                     Rng& rng);

// Argmax of expected reward over beams; ties go to the lowest index.
int best_beam(const ChannelParams& params, const PatternMatrix& patterns);
int best_beam(const ChannelParams& params, const Codebook& codebook);

enum class GridPreset { deepmimo_like, deepsense_like };

std::optional<GridPreset> grid_preset_from_string(const std::string& name);

// Explicit grid description. Angles come either as a list or a linear span,
// gain magnitudes as a list or a log-spaced span; an optional phase list
// turns the magnitude grid into a complex product grid.
struct GridSpec {
  std::vector<double> theta_list_deg;
  struct LinearSpan {
    double start_deg = 0.0;
    double step_deg = 1.0;
    int count = 0;
  };
  std::optional<LinearSpan> theta_span;

  std::vector<double> gain_list;
  struct LogSpan {
    double log_start = 0.0;
    double log_step = 1.0;
    int count = 0;
  };
  std::optional<LogSpan> gain_span;

  std::vector<double> gain_phases_deg;
};

ParameterGrid make_default_grids(GridPreset preset);
ParameterGrid make_default_grids(const GridSpec& spec);

}  // namespace beamalign
