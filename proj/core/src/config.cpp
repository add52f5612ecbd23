#include "beamalign/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace beamalign {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "run.horizon", "run.repetitions", "run.seed", "run.output",
      "environment.type", "environment.num_elements", "environment.spacing_m",
      "environment.wavelength_m", "environment.num_beams",
      "environment.theta_star_deg", "environment.beta_star",
      "environment.beta_star_phase_deg", "environment.sigma",
      "environment.trace_path", "environment.interp_factor",
      "grids.preset", "grids.theta_list_deg", "grids.theta_start_deg",
      "grids.theta_step_deg", "grids.theta_count", "grids.gain_list",
      "grids.gain_log_start", "grids.gain_log_step", "grids.gain_count",
      "grids.gain_phases_deg",
      "policy.name", "policy.k", "policy.m", "policy.tau",
      "policy.initial_theta_deg", "policy.initial_beta",
      "sweep.policies", "sweep.seeds", "sweep.horizons",
      "analysis.r_max", "analysis.delta", "analysis.trials", "analysis.pulls",
  };
  return keys;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text,
                                    const std::string& origin) {
  ConfigFile out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                 ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                 ": empty section name");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": empty key");
    }
    if (section.empty()) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": key outside any [section]");
    }
    const std::string full = section + "." + key;
    if (known_keys().count(full) == 0) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": unknown key '" + full + "'");
    }
    out.entries_[full] = value;
  }
  return out;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

bool ConfigFile::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

void ConfigFile::set(const std::string& key, const std::string& value) {
  if (known_keys().count(key) == 0) {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  entries_[key] = value;
}

std::string ConfigFile::get_string(const std::string& key,
                                   const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

std::string ConfigFile::require_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end() || it->second.empty()) {
    throw std::runtime_error("config: missing required key '" + key + "'");
  }
  return it->second;
}

namespace {

long parse_long(const std::string& value, const std::string& key) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw std::runtime_error("config: key '" + key + "': bad integer '" +
                             value + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw std::runtime_error("config: key '" + key + "': bad integer '" +
                             value + "'");
  }
  return static_cast<std::uint64_t>(v);
}

double parse_double(const std::string& value, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw std::runtime_error("config: key '" + key + "': bad number '" +
                             value + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : value) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cur = trim(cur);
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  std::vector<std::string> cleaned;
  for (auto& s : out) {
    if (!s.empty()) cleaned.push_back(s);
  }
  return cleaned;
}

}  // namespace

long ConfigFile::get_long(const std::string& key, long fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_long(it->second, key);
}

std::uint64_t ConfigFile::get_u64(const std::string& key,
                                  std::uint64_t fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_u64(it->second, key);
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_double(it->second, key);
}

std::vector<double> ConfigFile::get_double_list(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return {};
  std::vector<double> out;
  for (const std::string& cell : split_list(it->second)) {
    out.push_back(parse_double(cell, key));
  }
  return out;
}

std::vector<std::string> ConfigFile::get_string_list(
    const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return {};
  return split_list(it->second);
}

RunConfig run_config_from(const ConfigFile& file) {
  RunConfig cfg;
  cfg.horizon = file.get_long("run.horizon", cfg.horizon);
  cfg.repetitions = file.get_long("run.repetitions", cfg.repetitions);
  cfg.seed = file.get_u64("run.seed", cfg.seed);
  cfg.output_path = file.get_string("run.output", cfg.output_path);
  if (cfg.horizon < 1) {
    throw std::runtime_error("config: run.horizon must be >= 1");
  }
  if (cfg.repetitions < 1) {
    throw std::runtime_error("config: run.repetitions must be >= 1");
  }

  const std::string env_type = file.get_string("environment.type", "synthetic");
  if (env_type == "synthetic") {
    cfg.env_kind = EnvKind::synthetic;
  } else if (env_type == "trace") {
    cfg.env_kind = EnvKind::trace;
  } else {
    throw std::runtime_error("config: environment.type must be synthetic or trace");
  }
  cfg.geometry.num_elements = static_cast<int>(
      file.get_long("environment.num_elements", cfg.geometry.num_elements));
  cfg.geometry.spacing_m =
      file.get_double("environment.spacing_m", cfg.geometry.spacing_m);
  cfg.geometry.wavelength_m =
      file.get_double("environment.wavelength_m", cfg.geometry.wavelength_m);
  cfg.num_beams =
      static_cast<int>(file.get_long("environment.num_beams", cfg.num_beams));
  cfg.theta_star_deg = file.get_double_list("environment.theta_star_deg");
  cfg.beta_star = file.get_double_list("environment.beta_star");
  cfg.beta_star_phase_deg =
      file.get_double_list("environment.beta_star_phase_deg");
  cfg.sigma = file.get_double("environment.sigma", cfg.sigma);
  cfg.trace_path = file.get_string("environment.trace_path", "");
  cfg.interp_factor = file.get_long("environment.interp_factor", 1);
  if (cfg.sigma < 0.0) {
    throw std::runtime_error("config: environment.sigma must be >= 0");
  }
  if (cfg.env_kind == EnvKind::synthetic) {
    if (cfg.theta_star_deg.empty() || cfg.beta_star.empty()) {
      throw std::runtime_error(
          "config: synthetic environment needs theta_star_deg and beta_star");
    }
    if (cfg.theta_star_deg.size() != cfg.beta_star.size()) {
      throw std::runtime_error(
          "config: theta_star_deg and beta_star lengths differ");
    }
    if (!cfg.beta_star_phase_deg.empty() &&
        cfg.beta_star_phase_deg.size() != cfg.beta_star.size()) {
      throw std::runtime_error(
          "config: beta_star_phase_deg length must match beta_star");
    }
  } else {
    if (cfg.trace_path.empty()) {
      throw std::runtime_error("config: trace environment needs trace_path");
    }
    if (cfg.interp_factor < 1) {
      throw std::runtime_error("config: environment.interp_factor must be >= 1");
    }
  }

  if (file.has("grids.preset")) {
    static const char* kExplicitGridKeys[] = {
        "grids.theta_list_deg", "grids.theta_start_deg",
        "grids.theta_step_deg", "grids.theta_count",
        "grids.gain_list",      "grids.gain_log_start",
        "grids.gain_log_step",  "grids.gain_count",
        "grids.gain_phases_deg"};
    for (const char* key : kExplicitGridKeys) {
      if (file.has(key)) {
        throw std::runtime_error(
            std::string("config: grids.preset conflicts with '") + key + "'");
      }
    }
    const std::string preset = file.require_string("grids.preset");
    cfg.grid_preset = grid_preset_from_string(preset);
    if (!cfg.grid_preset) {
      throw std::runtime_error("config: unknown grids.preset '" + preset + "'");
    }
  } else {
    GridSpec spec;
    spec.theta_list_deg = file.get_double_list("grids.theta_list_deg");
    if (file.has("grids.theta_count")) {
      spec.theta_span = GridSpec::LinearSpan{
          file.get_double("grids.theta_start_deg", 0.0),
          file.get_double("grids.theta_step_deg", 1.0),
          static_cast<int>(file.get_long("grids.theta_count", 0))};
    }
    spec.gain_list = file.get_double_list("grids.gain_list");
    if (file.has("grids.gain_count")) {
      spec.gain_span = GridSpec::LogSpan{
          file.get_double("grids.gain_log_start", 0.0),
          file.get_double("grids.gain_log_step", 1.0),
          static_cast<int>(file.get_long("grids.gain_count", 0))};
    }
    spec.gain_phases_deg = file.get_double_list("grids.gain_phases_deg");
    cfg.grid_spec = spec;
  }

  cfg.policy_name = file.get_string("policy.name", cfg.policy_name);
  cfg.num_paths = static_cast<int>(file.get_long("policy.k", cfg.num_paths));
  if (cfg.num_paths < 1) {
    throw std::runtime_error("config: policy.k must be >= 1");
  }
  const std::string m_value = file.get_string("policy.m", "");
  if (m_value == "auto") {
    cfg.explore_len_auto = true;
  } else if (!m_value.empty()) {
    cfg.explore_len = parse_long(m_value, "policy.m");
    if (cfg.explore_len < 1) {
      throw std::runtime_error("config: policy.m must be >= 1 or auto");
    }
  }
  cfg.tau = file.get_long("policy.tau", cfg.tau);
  if (cfg.tau < 0) {
    throw std::runtime_error("config: policy.tau must be >= 0");
  }
  cfg.initial_theta_deg = file.get_double_list("policy.initial_theta_deg");
  cfg.initial_beta = file.get_double_list("policy.initial_beta");

  for (const std::string& p : file.get_string_list("sweep.policies")) {
    cfg.sweep_policies.push_back(p);
  }
  const auto seed_list = file.get_string_list("sweep.seeds");
  for (const std::string& s : seed_list) {
    cfg.sweep_seeds.push_back(parse_u64(s, "sweep.seeds"));
  }
  const auto horizon_list = file.get_string_list("sweep.horizons");
  for (const std::string& h : horizon_list) {
    const long v = parse_long(h, "sweep.horizons");
    if (v < 1) {
      throw std::runtime_error("config: sweep.horizons entries must be >= 1");
    }
    cfg.sweep_horizons.push_back(v);
  }

  cfg.r_max = file.get_double("analysis.r_max", cfg.r_max);
  cfg.delta = file.get_double("analysis.delta", cfg.delta);
  cfg.trials = file.get_long("analysis.trials", cfg.trials);
  cfg.pulls = file.get_long("analysis.pulls", cfg.pulls);

  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return run_config_from(ConfigFile::parse_file(path));
}

ChannelParams truth_params(const RunConfig& config) {
  if (config.env_kind != EnvKind::synthetic) {
    throw std::runtime_error(
        "config: ground-truth parameters exist only for synthetic environments");
  }
  std::vector<double> thetas;
  std::vector<cplx> betas;
  for (std::size_t i = 0; i < config.theta_star_deg.size(); ++i) {
    thetas.push_back(deg_to_rad(config.theta_star_deg[i]));
    double phase = 0.0;
    if (!config.beta_star_phase_deg.empty()) {
      phase = deg_to_rad(config.beta_star_phase_deg[i]);
    }
    betas.push_back(config.beta_star[i] *
                    cplx(std::cos(phase), std::sin(phase)));
  }
  return ChannelParams(std::move(thetas), std::move(betas));
}

ParameterGrid config_grids(const RunConfig& config) {
  if (config.grid_preset) {
    return make_default_grids(*config.grid_preset);
  }
  return make_default_grids(config.grid_spec);
}

}  // namespace beamalign
