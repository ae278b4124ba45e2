#pragma once

#include <complex>
#include <cstdint>
#include <vector>

// Phase-only holograms for ring lattices: a lens maps SLM plane to focal plane
// (centred unitary FFT), the angular spectrum method moves along the axis.
namespace ringqubit::kinoform {

struct ComplexField {
  int width = 0;
  int height = 0;
  double pixel_pitch = 1.0;  // meters
  std::vector<std::complex<double>> values;  // row-major, origin at the grid centre

  ComplexField() = default;
  ComplexField(int w, int h, double pitch);
  std::complex<double>& at(int r, int c) { return values[static_cast<size_t>(r) * width + c]; }
  const std::complex<double>& at(int r, int c) const {
    return values[static_cast<size_t>(r) * width + c];
  }
  double power() const;
};

struct Peak {
  double row;  // nominal centre, fractional pixels
  double col;
  double amplitude;  // target peak intensity
};

struct TargetPattern {
  int size = 0;
  std::vector<double> intensity;
  std::vector<std::uint8_t> signal_mask;
  std::vector<std::uint8_t> noise_mask;  // pixels in neither mask form the guard band
  std::vector<Peak> peaks;
  double well_width = 1.0;  // px, sets the peak search window

  void validate() const;
};

TargetPattern ring_lattice_target(int n_wells, double radius_px, double well_width_px,
                                  double weak_link_depth, int grid, int guard_px = 3,
                                  double annulus_halfwidth_px = 0.0);  // 0 means 3 well widths

ComplexField truncated_gaussian_beam(int grid, double waist_px, double truncation_radius_px,
                                     double pixel_pitch);

// Lens transform SLM -> focal plane and back, unitary.
ComplexField to_focal_plane(const ComplexField& slm);
ComplexField to_slm_plane(const ComplexField& focal);

ComplexField angular_spectrum_propagate(const ComplexField& field, double distance,
                                        double wavelength);

// Conical starts from an axicon phase that already throws the beam onto the ring.
enum class StartPhase { Random, Flat, Conical };

struct MrafOptions {
  double mixing = 0.4;
  int max_iterations = 200;
  double tolerance = 1e-7;  // on the change of rms between iterations
  // Ten straight rises ending above (1 + margin) * best rms count as divergence.
  double divergence_margin = 0.25;
  StartPhase start = StartPhase::Conical;
  std::uint64_t seed = 1;  // used by the random start
  int phase_levels = 256;  // 0 keeps the continuous phase
  double focal_pitch = 87.5e-6 / 60.0;  // meters per focal-plane pixel
};

struct KinoformResult {
  std::vector<double> phase_mask;  // [0, 2 pi)
  ComplexField focal_field;
  std::vector<double> intensity;
  double rms_error = 0.0;
  double rms_error_unquantized = 0.0;
  double efficiency = 0.0;  // signal power / total
  double noise_power = 0.0;  // everything outside the signal region / total
  double loss = 0.0;  // unaccounted power (evanescent or numerical)
  int iterations = 0;
  std::vector<double> rms_trace;
  std::vector<double> best_trace;  // running minimum of rms_trace
};

KinoformResult mraf_solve(const ComplexField& input_beam, const TargetPattern& target,
                          const MrafOptions& options = {});

// Relative rms deviation of the best-scaled well peaks from their targets.
double well_rms_error(const std::vector<double>& intensity, const TargetPattern& target);
std::vector<double> well_peaks(const std::vector<double>& intensity, const TargetPattern& target);

struct CircleFit {
  double row;
  double col;
  double radius;
};
CircleFit fit_ring_radius(const std::vector<double>& intensity, const TargetPattern& target);

struct AxialSample {
  double z_over_r;
  double rms_error;
  double fitted_radius;  // px
};

// z positions are in units of the target ring radius.
std::vector<AxialSample> axial_scan(const KinoformResult& result, const TargetPattern& target,
                                    const std::vector<double>& z_over_r, double ring_radius_px,
                                    double wavelength);

// Least-squares slope of (R(z) - R(0)) / R(0) against z / R over the samples.
double radius_drift_slope(const std::vector<AxialSample>& scan);

}  // namespace ringqubit::kinoform
