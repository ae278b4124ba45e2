#include "ringqubit/kinoform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "ringqubit/error.hpp"
#include "ringqubit/fft.hpp"

namespace ringqubit::kinoform {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
using C = std::complex<double>;

// Swap quadrants; for even sizes this is both fftshift and its inverse.
void roll_half(std::vector<C>& v, int w, int h) {
  std::vector<C> out(v.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      out[static_cast<size_t>((r + h / 2) % h) * w + (c + w / 2) % w] =
          v[static_cast<size_t>(r) * w + c];
    }
  }
  v.swap(out);
}

ComplexField centred_transform(const ComplexField& in, int sign) {
  if (in.width % 2 || in.height % 2) throw std::invalid_argument("grid sizes must be even");
  ComplexField out = in;
  roll_half(out.values, out.width, out.height);
  fft::fft2(out.values, out.height, out.width, sign);
  roll_half(out.values, out.width, out.height);
  const double norm = 1.0 / std::sqrt(static_cast<double>(in.width) * in.height);
  for (auto& v : out.values) v *= norm;
  return out;
}

std::vector<double> intensity_of(const ComplexField& f) {
  std::vector<double> i(f.values.size());
  for (size_t k = 0; k < i.size(); ++k) i[k] = std::norm(f.values[k]);
  return i;
}

ComplexField apply_phase(const ComplexField& beam, const std::vector<double>& phase) {
  ComplexField slm = beam;
  for (size_t k = 0; k < slm.values.size(); ++k) {
    slm.values[k] = std::abs(beam.values[k]) * std::polar(1.0, phase[k]);
  }
  return slm;
}

double wrap(double phi) {
  double p = std::fmod(phi, kTwoPi);
  if (p < 0.0) p += kTwoPi;
  if (p >= kTwoPi) p = 0.0;
  return p;
}

std::vector<double> quantize(const std::vector<double>& phase, int levels) {
  if (levels <= 0) return phase;
  std::vector<double> q(phase.size());
  for (size_t k = 0; k < q.size(); ++k) {
    const long step = std::lround(phase[k] / kTwoPi * levels) % levels;
    q[k] = kTwoPi * step / levels;
  }
  return q;
}

struct PowerSplit {
  double signal = 0.0;
  double outside = 0.0;
};

PowerSplit split_power(const std::vector<double>& intensity, const TargetPattern& t) {
  PowerSplit p;
  for (size_t k = 0; k < intensity.size(); ++k) (t.signal_mask[k] ? p.signal : p.outside) += intensity[k];
  return p;
}

int peak_window(const TargetPattern& t) {
  return std::max(1, static_cast<int>(std::lround(t.well_width)));
}

}  // namespace

ComplexField::ComplexField(int w, int h, double pitch)
    : width(w), height(h), pixel_pitch(pitch), values(static_cast<size_t>(w) * h) {
  if (w <= 0 || h <= 0) throw std::invalid_argument("field dimensions must be positive");
  if (!(pitch > 0.0)) throw std::invalid_argument("pixel pitch must be positive");
}

double ComplexField::power() const {
  double p = 0.0;
  for (const auto& v : values) p += std::norm(v);
  return p;
}

void TargetPattern::validate() const {
  const size_t n = static_cast<size_t>(size) * size;
  if (intensity.size() != n || signal_mask.size() != n || noise_mask.size() != n) {
    throw std::invalid_argument("target arrays do not match the grid size");
  }
  for (size_t k = 0; k < n; ++k) {
    if (signal_mask[k] && noise_mask[k]) throw std::invalid_argument("signal and noise masks overlap");
    if (intensity[k] < 0.0) throw std::invalid_argument("target intensity must be non-negative");
    if (!signal_mask[k] && intensity[k] != 0.0) {
      throw std::invalid_argument("target must vanish outside the signal region");
    }
  }
}

TargetPattern ring_lattice_target(int n_wells, double radius_px, double well_width_px,
                                  double weak_link_depth, int grid, int guard_px,
                                  double annulus_halfwidth_px) {
  if (n_wells < 1) throw std::invalid_argument("need at least one well");
  if (!(well_width_px > 0.0) || !(radius_px > 0.0)) {
    throw std::invalid_argument("ring radius and well width must be positive");
  }
  if (weak_link_depth < 0.0 || weak_link_depth > 1.0) {
    throw std::invalid_argument("weak-link depth must lie in [0, 1]");
  }
  if (guard_px < 0) throw std::invalid_argument("guard band must be non-negative");
  if (annulus_halfwidth_px < 0.0) throw std::invalid_argument("annulus half-width must be non-negative");
  const double half_annulus = annulus_halfwidth_px > 0.0 ? annulus_halfwidth_px : 3.0 * well_width_px;
  const double centre = grid / 2.0;
  if (radius_px + half_annulus + guard_px + 2.0 > centre || radius_px - half_annulus < 0.0) {
    throw std::invalid_argument("geometric overflow: ring does not fit in the grid");
  }
  TargetPattern t;
  t.size = grid;
  t.well_width = well_width_px;
  const size_t n = static_cast<size_t>(grid) * grid;
  t.intensity.assign(n, 0.0);
  t.signal_mask.assign(n, 0);
  t.noise_mask.assign(n, 0);
  for (int w = 0; w < n_wells; ++w) {
    const double phi = kTwoPi * w / n_wells;
    t.peaks.push_back({centre + radius_px * std::sin(phi), centre + radius_px * std::cos(phi),
                       w == 0 ? 1.0 - weak_link_depth : 1.0});
  }
  for (int r = 0; r < grid; ++r) {
    for (int c = 0; c < grid; ++c) {
      const size_t k = static_cast<size_t>(r) * grid + c;
      const double rho = std::hypot(r - centre, c - centre);
      const double d = std::abs(rho - radius_px);
      if (d <= half_annulus) {
        t.signal_mask[k] = 1;
        double v = 0.0;
        for (const auto& p : t.peaks) {
          const double dr = r - p.row;
          const double dc = c - p.col;
          v += p.amplitude * std::exp(-(dr * dr + dc * dc) / (2.0 * well_width_px * well_width_px));
        }
        t.intensity[k] = v;
      } else if (d > half_annulus + guard_px) {
        t.noise_mask[k] = 1;
      }
    }
  }
  return t;
}

ComplexField truncated_gaussian_beam(int grid, double waist_px, double truncation_radius_px,
                                     double pixel_pitch) {
  if (!(waist_px > 0.0) || !(truncation_radius_px > 0.0)) {
    throw std::invalid_argument("beam waist and truncation radius must be positive");
  }
  ComplexField f(grid, grid, pixel_pitch);
  const double c = grid / 2.0;
  for (int r = 0; r < grid; ++r) {
    for (int col = 0; col < grid; ++col) {
      const double rho = std::hypot(r - c, col - c);
      f.at(r, col) = rho <= truncation_radius_px ? std::exp(-rho * rho / (waist_px * waist_px)) : 0.0;
    }
  }
  const double s = 1.0 / std::sqrt(f.power());
  for (auto& v : f.values) v *= s;
  return f;
}

ComplexField to_focal_plane(const ComplexField& slm) { return centred_transform(slm, -1); }
ComplexField to_slm_plane(const ComplexField& focal) { return centred_transform(focal, +1); }

ComplexField angular_spectrum_propagate(const ComplexField& field, double distance,
                                        double wavelength) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  ComplexField spec = to_slm_plane(field);  // centred spectrum; its sign convention cancels below
  const double k = kTwoPi / wavelength;
  const double dkx = kTwoPi / (field.width * field.pixel_pitch);
  const double dky = kTwoPi / (field.height * field.pixel_pitch);
  for (int r = 0; r < field.height; ++r) {
    const double ky = (r - field.height / 2) * dky;
    for (int c = 0; c < field.width; ++c) {
      const double kx = (c - field.width / 2) * dkx;
      const double kz2 = k * k - kx * kx - ky * ky;
      C& v = spec.at(r, c);
      v = kz2 > 0.0 ? v * std::polar(1.0, distance * std::sqrt(kz2)) : C(0.0, 0.0);
    }
  }
  ComplexField out = to_focal_plane(spec);
  out.pixel_pitch = field.pixel_pitch;
  return out;
}

std::vector<double> well_peaks(const std::vector<double>& intensity, const TargetPattern& t) {
  const int h = peak_window(t);
  std::vector<double> out;
  for (const auto& p : t.peaks) {
    const int r0 = static_cast<int>(std::lround(p.row));
    const int c0 = static_cast<int>(std::lround(p.col));
    double best = 0.0;
    for (int r = std::max(0, r0 - h); r <= std::min(t.size - 1, r0 + h); ++r) {
      for (int c = std::max(0, c0 - h); c <= std::min(t.size - 1, c0 + h); ++c) {
        best = std::max(best, intensity[static_cast<size_t>(r) * t.size + c]);
      }
    }
    out.push_back(best);
  }
  return out;
}

double well_rms_error(const std::vector<double>& intensity, const TargetPattern& t) {
  const std::vector<double> got = well_peaks(intensity, t);
  // Reference is the target sampled the same way, since the centres sit off-grid.
  const std::vector<double> want = well_peaks(t.intensity, t);
  double num = 0.0;
  double den = 0.0;
  double mean = 0.0;
  for (size_t i = 0; i < got.size(); ++i) {
    num += got[i] * want[i];
    den += got[i] * got[i];
    mean += want[i];
  }
  mean /= got.size();
  if (den == 0.0 || mean == 0.0) return 1.0;
  const double s = num / den;
  double acc = 0.0;
  for (size_t i = 0; i < got.size(); ++i) {
    const double d = s * got[i] - want[i];
    acc += d * d;
  }
  return std::sqrt(acc / got.size()) / mean;
}

KinoformResult mraf_solve(const ComplexField& input_beam, const TargetPattern& target,
                          const MrafOptions& o) {
  target.validate();
  if (input_beam.width != target.size || input_beam.height != target.size) {
    throw std::invalid_argument("beam and target grids differ");
  }
  if (!(o.mixing > 0.0) || o.mixing > 1.0) throw std::invalid_argument("mixing must lie in (0, 1]");
  if (o.max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (target.peaks.empty()) throw std::invalid_argument("target has no peaks to score");
  const size_t n = input_beam.values.size();

  std::vector<double> target_amp(n);
  double target_power = 0.0;
  for (size_t k = 0; k < n; ++k) {
    target_amp[k] = std::sqrt(target.intensity[k]);
    target_power += target.intensity[k];
  }
  if (target_power <= 0.0) throw std::invalid_argument("target carries no power");

  const double beam_power = input_beam.power();
  if (!(beam_power > 0.0)) throw std::invalid_argument("input beam carries no power");
  // Target amplitude normalised to the beam power.
  const double scale = std::sqrt(beam_power / target_power);

  std::vector<double> phase(n, 0.0);
  if (o.start == StartPhase::Random) {
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> uni(0.0, kTwoPi);
    for (auto& p : phase) p = uni(rng);
  } else if (o.start == StartPhase::Conical) {
    // A linear phase ramp of 2 pi R / N per pixel focuses at radius R.
    const double c = target.size / 2.0;
    double radius = 0.0;
    for (const auto& p : target.peaks) radius += std::hypot(p.row - c, p.col - c);
    radius /= target.peaks.size();
    for (int r = 0; r < target.size; ++r) {
      for (int col = 0; col < target.size; ++col) {
        phase[static_cast<size_t>(r) * target.size + col] =
            wrap(kTwoPi * radius * std::hypot(r - c, col - c) / target.size);
      }
    }
  }

  KinoformResult res;
  std::vector<double> best_phase = phase;
  double best = std::numeric_limits<double>::infinity();
  double previous = std::numeric_limits<double>::infinity();
  int rising = 0;
  for (int it = 0; it < o.max_iterations; ++it) {
    ComplexField focal = to_focal_plane(apply_phase(input_beam, phase));
    const std::vector<double> inten = intensity_of(focal);
    const double rms = well_rms_error(inten, target);
    res.rms_trace.push_back(rms);
    if (rms < best) {
      best = rms;
      best_phase = phase;
    }
    res.best_trace.push_back(best);
    res.iterations = it + 1;
    rising = rms > previous ? rising + 1 : 0;
    if (rising >= 10) {
      // A slow creep past the optimum just ends the run; the best mask is kept.
      if (rms <= (1.0 + o.divergence_margin) * best) break;
      std::ostringstream os;
      os << "MRAF diverging: rms rose for 10 consecutive iterations; trace tail";
      for (size_t k = res.rms_trace.size() - 11; k < res.rms_trace.size(); ++k) os << ' ' << res.rms_trace[k];
      throw NumericError(os.str());
    }
    if (std::abs(rms - previous) < o.tolerance) break;
    previous = rms;

    // Signal and guard: amplitude mixed toward the target, phase kept.
    // Noise region left free.
    for (size_t k = 0; k < n; ++k) {
      if (target.noise_mask[k]) continue;
      const double cur = std::abs(focal.values[k]);
      const double amp = o.mixing * scale * target_amp[k] + (1.0 - o.mixing) * cur;
      const C unit = cur > 0.0 ? focal.values[k] / cur : C(1.0, 0.0);
      focal.values[k] = amp * unit;
    }
    const ComplexField back = to_slm_plane(focal);
    for (size_t k = 0; k < n; ++k) phase[k] = wrap(std::arg(back.values[k]));
  }

  res.rms_error_unquantized = best;
  res.phase_mask = quantize(best_phase, o.phase_levels);
  for (auto& p : res.phase_mask) p = wrap(p);
  res.focal_field = to_focal_plane(apply_phase(input_beam, res.phase_mask));
  res.focal_field.pixel_pitch = o.focal_pitch;
  res.intensity = intensity_of(res.focal_field);
  res.rms_error = well_rms_error(res.intensity, target);
  const PowerSplit ps = split_power(res.intensity, target);
  res.efficiency = ps.signal / beam_power;
  res.noise_power = ps.outside / beam_power;
  res.loss = 1.0 - res.efficiency - res.noise_power;
  return res;
}

CircleFit fit_ring_radius(const std::vector<double>& intensity, const TargetPattern& t) {
  const int h = peak_window(t);
  // Intensity-weighted centroid of each well, then an algebraic (Kasa) circle fit.
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : t.peaks) {
    const int r0 = static_cast<int>(std::lround(p.row));
    const int c0 = static_cast<int>(std::lround(p.col));
    double w = 0.0;
    double sr = 0.0;
    double sc = 0.0;
    for (int r = std::max(0, r0 - h); r <= std::min(t.size - 1, r0 + h); ++r) {
      for (int c = std::max(0, c0 - h); c <= std::min(t.size - 1, c0 + h); ++c) {
        const double v = intensity[static_cast<size_t>(r) * t.size + c];
        w += v;
        sr += v * r;
        sc += v * c;
      }
    }
    if (w > 0.0) pts.emplace_back(sr / w, sc / w);
  }
  if (pts.size() < 3) throw NumericError("too few wells to fit a circle");
  Eigen::MatrixXd a(pts.size(), 3);
  Eigen::VectorXd b(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    a(i, 0) = 2.0 * pts[i].first;
    a(i, 1) = 2.0 * pts[i].second;
    a(i, 2) = 1.0;
    b(i) = pts[i].first * pts[i].first + pts[i].second * pts[i].second;
  }
  const Eigen::Vector3d x = a.colPivHouseholderQr().solve(b);
  return {x(0), x(1), std::sqrt(x(2) + x(0) * x(0) + x(1) * x(1))};
}

std::vector<AxialSample> axial_scan(const KinoformResult& result, const TargetPattern& target,
                                    const std::vector<double>& z_over_r, double ring_radius_px,
                                    double wavelength) {
  std::vector<AxialSample> out;
  const double r_m = ring_radius_px * result.focal_field.pixel_pitch;
  for (double z : z_over_r) {
    if (z == 0.0) {
      out.push_back({0.0, result.rms_error, fit_ring_radius(result.intensity, target).radius});
      continue;
    }
    const ComplexField f = angular_spectrum_propagate(result.focal_field, z * r_m, wavelength);
    const std::vector<double> inten = intensity_of(f);
    out.push_back({z, well_rms_error(inten, target), fit_ring_radius(inten, target).radius});
  }
  return out;
}

double radius_drift_slope(const std::vector<AxialSample>& scan) {
  double r0 = 0.0;
  bool have = false;
  for (const auto& s : scan) {
    if (s.z_over_r == 0.0) {
      r0 = s.fitted_radius;
      have = true;
    }
  }
  if (!have) throw std::invalid_argument("scan must include z = 0");
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& s : scan) {
    sxx += s.z_over_r * s.z_over_r;
    sxy += s.z_over_r * (s.fitted_radius - r0) / r0;
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace ringqubit::kinoform
