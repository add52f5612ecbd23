#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "beamalign/channel.hpp"
#include "beamalign/rng.hpp"

namespace beamalign {

// Steps are zero-based indices 0..horizon-1. Policies never see this
// interface; the run loop mediates so oracle rewards stay hidden.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual int num_beams() const = 0;
  // Number of valid steps; empty means unbounded.
  virtual std::optional<long> horizon() const = 0;
  virtual bool stationary() const = 0;
  virtual double sample(long step, int beam, Rng& rng) const = 0;
  virtual std::vector<double> oracle_rewards(long step) const = 0;
};

class StationaryEnv : public Environment {
 public:
  StationaryEnv(ChannelParams params, const Codebook& codebook,
                NoiseModel noise);

  int num_beams() const override;
  std::optional<long> horizon() const override { return std::nullopt; }
  bool stationary() const override { return true; }
  double sample(long step, int beam, Rng& rng) const override;
  std::vector<double> oracle_rewards(long step) const override;

  const ChannelParams& params() const { return params_; }
  const NoiseModel& noise() const { return noise_; }

 private:
  ChannelParams params_;
  NoiseModel noise_;
  std::vector<double> expected_;  // per-beam, fixed for the whole horizon
};

// Per-tick, per-beam RSS values as ingested.
struct Trace {
  std::vector<long long> ticks;  // strictly increasing labels
  int num_beams = 0;
  std::vector<double> rss;  // ticks.size() x num_beams, row-major

  double value(std::size_t row, int beam) const {
    return rss[row * static_cast<std::size_t>(num_beams) +
               static_cast<std::size_t>(beam)];
  }
};

void validate(const Trace& trace);

// CSV: header `tick,beam_0,...,beam_{K-1}`, one row per tick.
Trace load_trace(const std::string& path);
void save_trace(const Trace& trace, const std::string& path);

// Expands each tick interval into `factor` steps by linear interpolation;
// horizon = (ticks-1)*factor + 1 so the last step lands on the last tick.
class TraceEnv : public Environment {
 public:
  TraceEnv(Trace trace, long factor, NoiseModel noise);

  int num_beams() const override { return trace_.num_beams; }
  std::optional<long> horizon() const override { return horizon_; }
  bool stationary() const override { return false; }
  double sample(long step, int beam, Rng& rng) const override;
  std::vector<double> oracle_rewards(long step) const override;

  long factor() const { return factor_; }

 private:
  double interpolate(long step, int beam) const;

  Trace trace_;
  long factor_ = 1;
  NoiseModel noise_;
  long horizon_ = 0;
};

TraceEnv build_trace_env(Trace trace, long factor, NoiseModel noise = {});

}  // namespace beamalign
