#pragma once

#include <complex>
#include <string>
#include <vector>

namespace beamalign {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

// Uniform linear array: element n sits at position n*spacing_m along the
// axis, n in [0, num_elements).
struct ArrayGeometry {
  int num_elements = 1;
  double spacing_m = 0.005;
  double wavelength_m = 0.011;
};

void validate(const ArrayGeometry& geom);

// Response of the array to a plane wave from angle theta (radians):
// element n gets phase -2*pi/lambda * n * d * cos(theta).
std::vector<cplx> array_response(const ArrayGeometry& geom, double theta_rad);

// Inner product f^T v(theta), plain transpose (no conjugation).
cplx beam_gain(const std::vector<cplx>& weights, const std::vector<cplx>& response);

// Precomputed complex gains of every beam on a fixed angle grid.
// Row-major: entry(a, j) = gain of beam a at grid angle j.
struct PatternMatrix {
  std::vector<double> theta_grid_rad;  // strictly increasing
  int num_beams = 0;
  std::vector<cplx> entries;  // num_beams * theta_grid_rad.size()

  cplx entry(int beam, int theta_idx) const {
    return entries[static_cast<std::size_t>(beam) * theta_grid_rad.size() +
                   static_cast<std::size_t>(theta_idx)];
  }
  // Exact-match lookup of a grid angle; throws if absent.
  int index_of(double theta_rad) const;
};

// A set of beams. Holds either explicit steering vectors or a precomputed
// pattern on a grid; exactly one of the two is the source of truth.
class Codebook {
 public:
  static Codebook from_steering_vectors(ArrayGeometry geom,
                                        std::vector<std::vector<cplx>> vectors);
  static Codebook from_pattern(PatternMatrix pattern);

  int num_beams() const;
  bool has_steering_vectors() const { return !vectors_.empty(); }

  const std::vector<std::vector<cplx>>& steering_vectors() const;
  const PatternMatrix& pattern() const;

  // Gain of beam a at theta. Steering-vector codebooks evaluate the array
  // response; pattern-only codebooks require theta to be on the stored grid.
  cplx gain(int beam, double theta_rad) const;

  const ArrayGeometry& geometry() const;

 private:
  Codebook() = default;
  ArrayGeometry geom_{};
  bool has_geom_ = false;
  std::vector<std::vector<cplx>> vectors_;
  PatternMatrix pattern_;
  bool has_pattern_ = false;
};

// K-beam DFT codebook: beam a has weights exp(+j*2*pi/lambda * n*d*cos(pi*a/K)),
// so beam a points at theta = pi*a/K.
Codebook dft_codebook(const ArrayGeometry& geom, int num_beams);

double dft_beam_angle_rad(int beam, int num_beams);

// Evaluate (or pass through) the codebook's pattern on the given grid.
// Pattern-only codebooks must be asked for exactly their stored grid.
PatternMatrix pattern_matrix(const Codebook& codebook,
                             const std::vector<double>& theta_grid_rad);

// CSV persistence. Header: theta_deg,beam_0_re,beam_0_im,beam_1_re,...
// Values are written round-trip exact.
void save_pattern_csv(const PatternMatrix& pattern, const std::string& path);
PatternMatrix load_pattern_csv(const std::string& path);

}  // namespace beamalign
