#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "beamalign/channel.hpp"

namespace beamalign {

// Flat sectioned key = value text. Keys are addressed as "section.key".
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text,
                                 const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

enum class EnvKind { synthetic, trace };

struct RunConfig {
  // [run]
  long horizon = 1;
  long repetitions = 1;
  std::uint64_t seed = 0;
  std::string output_path = "beamalign_out.csv";

  // [environment]
  EnvKind env_kind = EnvKind::synthetic;
  ArrayGeometry geometry{16, 0.005, 0.011};
  int num_beams = 16;
  std::vector<double> theta_star_deg;
  std::vector<double> beta_star;
  std::vector<double> beta_star_phase_deg;
  double sigma = 0.0;
  std::string trace_path;
  long interp_factor = 1;

  // [grids]
  std::optional<GridPreset> grid_preset;
  GridSpec grid_spec;

  // [policy]
  std::string policy_name = "pr-etc";
  int num_paths = 1;
  long explore_len = 20;
  bool explore_len_auto = false;
  long tau = 0;  // > 0 wraps the policy in a periodic restart
  std::vector<double> initial_theta_deg;
  std::vector<double> initial_beta;

  // [sweep]
  std::vector<std::string> sweep_policies;
  std::vector<std::uint64_t> sweep_seeds;
  std::vector<long> sweep_horizons;

  // [analysis]
  double r_max = 70.0;
  double delta = 0.1;
  long trials = 200;
  long pulls = 30;
};

RunConfig run_config_from(const ConfigFile& file);
RunConfig load_run_config(const std::string& path);

// Ground-truth channel parameters of a synthetic environment config.
ChannelParams truth_params(const RunConfig& config);

// The estimation grid the config describes (preset or explicit spec).
ParameterGrid config_grids(const RunConfig& config);

}  // namespace beamalign
