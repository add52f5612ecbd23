#include "beamalign/environment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace beamalign {

StationaryEnv::StationaryEnv(ChannelParams params, const Codebook& codebook,
                             NoiseModel noise)
    : params_(std::move(params)), noise_(noise) {
  validate(noise_);
  expected_.reserve(static_cast<std::size_t>(codebook.num_beams()));
  for (int a = 0; a < codebook.num_beams(); ++a) {
    expected_.push_back(expected_reward(params_, a, codebook));
  }
}

int StationaryEnv::num_beams() const {
  return static_cast<int>(expected_.size());
}

double StationaryEnv::sample(long step, int beam, Rng& rng) const {
  (void)step;
  if (beam < 0 || beam >= num_beams()) {
    throw std::invalid_argument("environment: beam index out of range");
  }
  const double r = expected_[static_cast<std::size_t>(beam)];
  if (noise_.sigma_dbm == 0.0) return r;
  std::normal_distribution<double> dist(0.0, noise_.sigma_dbm);
  return r + dist(rng);
}

std::vector<double> StationaryEnv::oracle_rewards(long step) const {
  (void)step;
  return expected_;
}

void validate(const Trace& trace) {
  if (trace.num_beams < 1) {
    throw std::invalid_argument("trace: num_beams must be >= 1");
  }
  if (trace.ticks.empty()) {
    throw std::invalid_argument("trace: at least one tick required");
  }
  if (trace.rss.size() != trace.ticks.size() *
                              static_cast<std::size_t>(trace.num_beams)) {
    throw std::invalid_argument("trace: rss table is not rectangular");
  }
  for (std::size_t i = 1; i < trace.ticks.size(); ++i) {
    if (trace.ticks[i] <= trace.ticks[i - 1]) {
      throw std::invalid_argument("trace: ticks must be strictly increasing");
    }
  }
  for (double v : trace.rss) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("trace: all values must be finite");
    }
  }
}

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("trace csv: cannot open: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("trace csv: empty file: " + path);
  }
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "tick") {
    throw std::runtime_error("trace csv: malformed header, expected tick,beam_0,...");
  }
  for (std::size_t a = 1; a < header.size(); ++a) {
    if (header[a] != "beam_" + std::to_string(a - 1)) {
      throw std::runtime_error("trace csv: malformed header column " +
                               std::to_string(a) + ": '" + header[a] + "'");
    }
  }
  Trace trace;
  trace.num_beams = static_cast<int>(header.size() - 1);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("trace csv: row " + std::to_string(row) +
                               " has " + std::to_string(cells.size()) +
                               " cells, expected " + std::to_string(header.size()));
    }
    char* end = nullptr;
    const long long tick = std::strtoll(cells[0].c_str(), &end, 10);
    if (end == cells[0].c_str() || *end != '\0') {
      throw std::runtime_error("trace csv: row " + std::to_string(row) +
                               " col tick: bad integer '" + cells[0] + "'");
    }
    trace.ticks.push_back(tick);
    for (std::size_t a = 1; a < cells.size(); ++a) {
      end = nullptr;
      const double v = std::strtod(cells[a].c_str(), &end);
      if (end == cells[a].c_str() || *end != '\0') {
        throw std::runtime_error("trace csv: row " + std::to_string(row) +
                                 " col beam_" + std::to_string(a - 1) +
                                 ": bad numeric cell '" + cells[a] + "'");
      }
      trace.rss.push_back(v);
    }
  }
  validate(trace);
  return trace;
}

void save_trace(const Trace& trace, const std::string& path) {
  validate(trace);
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("trace csv: cannot open for writing: " + path);
  }
  out << "tick";
  for (int a = 0; a < trace.num_beams; ++a) out << ",beam_" << a;
  out << "\n";
  for (std::size_t i = 0; i < trace.ticks.size(); ++i) {
    out << trace.ticks[i];
    for (int a = 0; a < trace.num_beams; ++a) {
      out << ',' << fmt_double(trace.value(i, a));
    }
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("trace csv: write failed: " + path);
  }
}

TraceEnv::TraceEnv(Trace trace, long factor, NoiseModel noise)
    : trace_(std::move(trace)), factor_(factor), noise_(noise) {
  validate(trace_);
  validate(noise_);
  if (trace_.ticks.size() < 2) {
    throw std::runtime_error(
        "trace environment: insufficient trace, need at least 2 ticks");
  }
  if (factor_ < 1) {
    throw std::invalid_argument("trace environment: factor must be >= 1");
  }
  horizon_ = static_cast<long>(trace_.ticks.size() - 1) * factor_ + 1;
}

double TraceEnv::interpolate(long step, int beam) const {
  const std::size_t i = static_cast<std::size_t>(step / factor_);
  const long rem = step % factor_;
  const double a = trace_.value(i, beam);
  if (rem == 0) return a;
  const double b = trace_.value(i + 1, beam);
  const double frac = static_cast<double>(rem) / static_cast<double>(factor_);
  return a + frac * (b - a);
}

double TraceEnv::sample(long step, int beam, Rng& rng) const {
  if (step < 0 || step >= horizon_) {
    throw std::runtime_error("trace environment: horizon exceeded at step " +
                             std::to_string(step));
  }
  if (beam < 0 || beam >= num_beams()) {
    throw std::invalid_argument("environment: beam index out of range");
  }
  const double r = interpolate(step, beam);
  if (noise_.sigma_dbm == 0.0) return r;
  std::normal_distribution<double> dist(0.0, noise_.sigma_dbm);
  return r + dist(rng);
}

std::vector<double> TraceEnv::oracle_rewards(long step) const {
  if (step < 0 || step >= horizon_) {
    throw std::runtime_error("trace environment: horizon exceeded at step " +
                             std::to_string(step));
  }
  std::vector<double> out(static_cast<std::size_t>(num_beams()));
  for (int a = 0; a < num_beams(); ++a) {
    out[static_cast<std::size_t>(a)] = interpolate(step, a);
  }
  return out;
}

TraceEnv build_trace_env(Trace trace, long factor, NoiseModel noise) {
  return TraceEnv(std::move(trace), factor, noise);
}

}  // namespace beamalign
