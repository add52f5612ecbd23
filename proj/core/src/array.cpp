#include "beamalign/array.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace beamalign {

void validate(const ArrayGeometry& geom) {
  if (geom.num_elements < 1) {
    throw std::invalid_argument("array geometry: num_elements must be >= 1");
  }
  if (!(geom.spacing_m > 0.0) || !std::isfinite(geom.spacing_m)) {
    throw std::invalid_argument("array geometry: spacing_m must be positive");
  }
  if (!(geom.wavelength_m > 0.0) || !std::isfinite(geom.wavelength_m)) {
    throw std::invalid_argument("array geometry: wavelength_m must be positive");
  }
}

std::vector<cplx> array_response(const ArrayGeometry& geom, double theta_rad) {
  validate(geom);
  if (!std::isfinite(theta_rad)) {
    throw std::invalid_argument("array_response: angle must be finite");
  }
  const double step =
      -2.0 * kPi / geom.wavelength_m * geom.spacing_m * std::cos(theta_rad);
  std::vector<cplx> v(static_cast<std::size_t>(geom.num_elements));
  for (int n = 0; n < geom.num_elements; ++n) {
    const double phase = step * n;
    v[static_cast<std::size_t>(n)] = cplx(std::cos(phase), std::sin(phase));
  }
  return v;
}

cplx beam_gain(const std::vector<cplx>& weights,
               const std::vector<cplx>& response) {
  if (weights.size() != response.size()) {
    throw std::invalid_argument("beam_gain: weight/response length mismatch");
  }
  cplx acc(0.0, 0.0);
  for (std::size_t n = 0; n < weights.size(); ++n) {
    acc += weights[n] * response[n];
  }
  return acc;
}

int PatternMatrix::index_of(double theta_rad) const {
  for (std::size_t j = 0; j < theta_grid_rad.size(); ++j) {
    if (theta_grid_rad[j] == theta_rad) return static_cast<int>(j);
  }
  throw std::runtime_error("pattern matrix: unresolvable angle, not on grid");
}

Codebook Codebook::from_steering_vectors(ArrayGeometry geom,
                                         std::vector<std::vector<cplx>> vectors) {
  validate(geom);
  if (vectors.empty()) {
    throw std::invalid_argument("codebook: at least one steering vector required");
  }
  for (const auto& v : vectors) {
    if (static_cast<int>(v.size()) != geom.num_elements) {
      throw std::invalid_argument(
          "codebook: steering vector length must match num_elements");
    }
  }
  Codebook cb;
  cb.geom_ = geom;
  cb.has_geom_ = true;
  cb.vectors_ = std::move(vectors);
  return cb;
}

Codebook Codebook::from_pattern(PatternMatrix pattern) {
  if (pattern.num_beams < 1) {
    throw std::invalid_argument("codebook: pattern must have at least one beam");
  }
  if (pattern.theta_grid_rad.empty()) {
    throw std::invalid_argument("codebook: pattern grid must be non-empty");
  }
  for (std::size_t j = 1; j < pattern.theta_grid_rad.size(); ++j) {
    if (!(pattern.theta_grid_rad[j] > pattern.theta_grid_rad[j - 1])) {
      throw std::invalid_argument(
          "codebook: pattern grid must be strictly increasing");
    }
  }
  if (pattern.entries.size() != static_cast<std::size_t>(pattern.num_beams) *
                                    pattern.theta_grid_rad.size()) {
    throw std::invalid_argument("codebook: pattern entry count mismatch");
  }
  Codebook cb;
  cb.pattern_ = std::move(pattern);
  cb.has_pattern_ = true;
  return cb;
}

int Codebook::num_beams() const {
  return has_pattern_ ? pattern_.num_beams : static_cast<int>(vectors_.size());
}

const std::vector<std::vector<cplx>>& Codebook::steering_vectors() const {
  if (vectors_.empty()) {
    throw std::runtime_error("codebook: no steering vectors, pattern-only");
  }
  return vectors_;
}

const PatternMatrix& Codebook::pattern() const {
  if (!has_pattern_) {
    throw std::runtime_error("codebook: no stored pattern");
  }
  return pattern_;
}

const ArrayGeometry& Codebook::geometry() const {
  if (!has_geom_) {
    throw std::runtime_error("codebook: pattern-only, no geometry");
  }
  return geom_;
}

cplx Codebook::gain(int beam, double theta_rad) const {
  if (beam < 0 || beam >= num_beams()) {
    throw std::invalid_argument("codebook: beam index out of range");
  }
  if (has_pattern_) {
    return pattern_.entry(beam, pattern_.index_of(theta_rad));
  }
  return beam_gain(vectors_[static_cast<std::size_t>(beam)],
                   array_response(geom_, theta_rad));
}

double dft_beam_angle_rad(int beam, int num_beams) {
  return kPi * static_cast<double>(beam) / static_cast<double>(num_beams);
}

Codebook dft_codebook(const ArrayGeometry& geom, int num_beams) {
  validate(geom);
  if (num_beams < 1) {
    throw std::invalid_argument("dft_codebook: num_beams must be >= 1");
  }
  std::vector<std::vector<cplx>> vectors;
  vectors.reserve(static_cast<std::size_t>(num_beams));
  for (int a = 0; a < num_beams; ++a) {
    const double step = 2.0 * kPi / geom.wavelength_m * geom.spacing_m *
                        std::cos(dft_beam_angle_rad(a, num_beams));
    std::vector<cplx> f(static_cast<std::size_t>(geom.num_elements));
    for (int n = 0; n < geom.num_elements; ++n) {
      const double phase = step * n;
      f[static_cast<std::size_t>(n)] = cplx(std::cos(phase), std::sin(phase));
    }
    vectors.push_back(std::move(f));
  }
  return Codebook::from_steering_vectors(geom, std::move(vectors));
}

PatternMatrix pattern_matrix(const Codebook& codebook,
                             const std::vector<double>& theta_grid_rad) {
  if (theta_grid_rad.empty()) {
    throw std::invalid_argument("pattern_matrix: grid must be non-empty");
  }
  for (std::size_t j = 1; j < theta_grid_rad.size(); ++j) {
    if (!(theta_grid_rad[j] > theta_grid_rad[j - 1])) {
      throw std::invalid_argument("pattern_matrix: grid must be strictly increasing");
    }
  }
  if (!codebook.has_steering_vectors()) {
    // Pattern-only codebooks cannot be re-evaluated on a new grid.
    const PatternMatrix& stored = codebook.pattern();
    if (stored.theta_grid_rad != theta_grid_rad) {
      throw std::runtime_error(
          "pattern_matrix: incompatible grid for pattern-only codebook");
    }
    return stored;
  }
  PatternMatrix out;
  out.theta_grid_rad = theta_grid_rad;
  out.num_beams = codebook.num_beams();
  out.entries.resize(static_cast<std::size_t>(out.num_beams) *
                     theta_grid_rad.size());
  const auto& vectors = codebook.steering_vectors();
  for (std::size_t j = 0; j < theta_grid_rad.size(); ++j) {
    const auto v = array_response(codebook.geometry(), theta_grid_rad[j]);
    for (int a = 0; a < out.num_beams; ++a) {
      out.entries[static_cast<std::size_t>(a) * theta_grid_rad.size() + j] =
          beam_gain(vectors[static_cast<std::size_t>(a)], v);
    }
  }
  return out;
}

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse_double(const std::string& cell, const std::string& where) {
  char* end = nullptr;
  const double x = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') {
    throw std::runtime_error("pattern csv: bad numeric cell at " + where +
                             ": '" + cell + "'");
  }
  return x;
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

void save_pattern_csv(const PatternMatrix& pattern, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("pattern csv: cannot open for writing: " + path);
  }
  out << "theta_deg";
  for (int a = 0; a < pattern.num_beams; ++a) {
    out << ",beam_" << a << "_re,beam_" << a << "_im";
  }
  out << "\n";
  for (std::size_t j = 0; j < pattern.theta_grid_rad.size(); ++j) {
    out << fmt_double(rad_to_deg(pattern.theta_grid_rad[j]));
    for (int a = 0; a < pattern.num_beams; ++a) {
      const cplx g = pattern.entry(a, static_cast<int>(j));
      out << ',' << fmt_double(g.real()) << ',' << fmt_double(g.imag());
    }
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("pattern csv: write failed: " + path);
  }
}

PatternMatrix load_pattern_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("pattern csv: cannot open: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("pattern csv: empty file: " + path);
  }
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "theta_deg" || header.size() < 3 ||
      (header.size() - 1) % 2 != 0) {
    throw std::runtime_error("pattern csv: malformed header: " + path);
  }
  const int num_beams = static_cast<int>((header.size() - 1) / 2);
  for (int a = 0; a < num_beams; ++a) {
    const std::string stem = "beam_" + std::to_string(a);
    if (header[static_cast<std::size_t>(1 + 2 * a)] != stem + "_re" ||
        header[static_cast<std::size_t>(2 + 2 * a)] != stem + "_im") {
      throw std::runtime_error("pattern csv: malformed header: " + path);
    }
  }
  PatternMatrix out;
  out.num_beams = num_beams;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("pattern csv: row " + std::to_string(row) +
                               " has wrong cell count");
    }
    const std::string rowtag = "row " + std::to_string(row);
    out.theta_grid_rad.push_back(
        deg_to_rad(parse_double(cells[0], rowtag + " col theta_deg")));
    for (int a = 0; a < num_beams; ++a) {
      const double re = parse_double(cells[static_cast<std::size_t>(1 + 2 * a)],
                                     rowtag + " col beam_" + std::to_string(a) + "_re");
      const double im = parse_double(cells[static_cast<std::size_t>(2 + 2 * a)],
                                     rowtag + " col beam_" + std::to_string(a) + "_im");
      out.entries.push_back(cplx(re, im));
    }
  }
  if (out.theta_grid_rad.empty()) {
    throw std::runtime_error("pattern csv: no data rows: " + path);
  }
  // Stored row-major by angle; transpose into beam-major entries.
  const std::size_t num_angles = out.theta_grid_rad.size();
  std::vector<cplx> by_beam(out.entries.size());
  for (std::size_t j = 0; j < num_angles; ++j) {
    for (int a = 0; a < num_beams; ++a) {
      by_beam[static_cast<std::size_t>(a) * num_angles + j] =
          out.entries[j * static_cast<std::size_t>(num_beams) +
                      static_cast<std::size_t>(a)];
    }
  }
  out.entries = std::move(by_beam);
  for (std::size_t j = 1; j < out.theta_grid_rad.size(); ++j) {
    if (!(out.theta_grid_rad[j] > out.theta_grid_rad[j - 1])) {
      throw std::runtime_error("pattern csv: angles must be strictly increasing");
    }
  }
  return out;
}

}  // namespace beamalign
