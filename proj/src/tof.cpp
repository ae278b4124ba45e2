#include "ringqubit/tof.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ringqubit/error.hpp"

namespace ringqubit::tof {

namespace {

constexpr double kPi = std::numbers::pi;

// Total occupation of one or two branches at gap x = eps_min - mu above the band floor.
double branch_sum(const std::vector<double>& eps, double eps_min, double x, double temp) {
  double n = 0.0;
  for (double e : eps) n += 1.0 / std::expm1(((e - eps_min) + x) / temp);
  return n;
}

// Solve sum_branches n(x) = target on a log scale in x.
double solve_gap(const std::vector<const std::vector<double>*>& branches, double eps_min,
                 double target, double temp) {
  auto total = [&](double x) {
    double n = 0.0;
    for (const auto* b : branches) n += branch_sum(*b, eps_min, x, temp);
    return n;
  };
  double scale = std::abs(eps_min);
  for (const auto* b : branches) {
    for (double e : *b) scale = std::max(scale, std::abs(e));
  }
  // Below this gap, eps - mu is no longer resolved in double precision.
  const double x_floor = std::max(8.0 * std::numeric_limits<double>::epsilon() * scale, 1e-300);
  if (total(x_floor) < target) {
    std::ostringstream os;
    os << "occupations saturate: even with mu at the band minimum only " << total(x_floor)
       << " of " << target << " bosons fit at k_B T = " << temp
       << " (grand-canonical model cannot hold the requested number)";
    throw NumericError(os.str());
  }
  double y_hi = std::log(std::max(1.0, 50.0 * temp));
  while (total(std::exp(y_hi)) > target) y_hi += 2.0;
  const double y_lo = std::log(x_floor);
  auto f = [&](double y) { return total(std::exp(y)) - target; };
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 300;
  const auto r = boost::math::tools::toms748_solve(f, y_lo, y_hi, tol, iters);
  const double y = 0.5 * (r.first + r.second);
  return std::exp(y);
}

}  // namespace

std::string plane_name(Plane p) { return p == Plane::XY ? "kxky" : "kykz"; }

BogoliubovSpectrum bogoliubov_spectrum(const model::LadderParams& p, MixingForm form) {
  p.validate();
  const int n = p.n_sites;
  BogoliubovSpectrum s;
  s.n_sites = n;
  s.flux_a = p.flux_a;
  s.flux_b = p.flux_b;
  s.t = p.t;
  s.g = p.g;
  for (int i = 0; i < n; ++i) {
    const double k = 2.0 * kPi * i / n;
    const double ca = std::cos(k + p.flux_a / n);
    const double cb = std::cos(k + p.flux_b / n);
    const double d = p.t * (form == MixingForm::Difference ? cb - ca : ca + cb);
    const double r = std::hypot(p.g, p.t * (ca - cb));
    const double rr = std::hypot(p.g, d);
    s.k_values.push_back(k);
    s.eps_alpha.push_back(-p.t * (ca + cb) - r);
    s.eps_beta.push_back(-p.t * (ca + cb) + r);
    double c2 = 1.0;
    double s2 = 0.0;
    if (rr > 0.0) {
      c2 = d / rr;
      s2 = p.g / rr;
    }
    s.cos2.push_back(c2);
    s.sin2.push_back(s2);
    s.theta_k.push_back(0.5 * std::atan2(s2, c2));
  }
  return s;
}

double rotation_residual(const BogoliubovSpectrum& s) {
  double worst = 0.0;
  for (int i = 0; i < s.n_sites; ++i) {
    const double k = s.k_values[i];
    const double haa = -2.0 * s.t * std::cos(k + s.flux_a / s.n_sites);
    const double hbb = -2.0 * s.t * std::cos(k + s.flux_b / s.n_sites);
    const double hab = -s.g;
    // alpha = sin a + cos b, beta = cos a - sin b.
    const double sn = std::sin(s.theta_k[i]);
    const double cs = std::cos(s.theta_k[i]);
    const double off = sn * cs * haa + (cs * cs - sn * sn) * hab - sn * cs * hbb;
    worst = std::max(worst, std::abs(off));
  }
  return worst;
}

OccupationSet solve_chemical_potentials(const BogoliubovSpectrum& s, double n_total,
                                        double temperature, std::optional<double> n_imbalance) {
  if (!(n_total > 0.0)) throw std::invalid_argument("total atom number must be positive");
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  OccupationSet occ;
  occ.temperature = temperature;
  const double amin = *std::min_element(s.eps_alpha.begin(), s.eps_alpha.end());
  const double bmin = *std::min_element(s.eps_beta.begin(), s.eps_beta.end());

  if (!n_imbalance || *n_imbalance == 0.0) {
    const double emin = std::min(amin, bmin);
    const double x = solve_gap({&s.eps_alpha, &s.eps_beta}, emin, n_total, temperature);
    occ.mu = emin - x;
    occ.mu_alpha = occ.mu_beta = occ.mu;
    occ.delta_mu = 0.0;
    // Evaluated through (eps - eps_min) + x, exactly as in the root function.
    for (double e : s.eps_alpha) occ.n_alpha.push_back(1.0 / std::expm1(((e - emin) + x) / temperature));
    for (double e : s.eps_beta) occ.n_beta.push_back(1.0 / std::expm1(((e - emin) + x) / temperature));
    return occ;
  }
  const double imb = *n_imbalance;
  if (std::abs(imb) >= n_total) throw std::invalid_argument("imbalance must be smaller than N_T");
  const double xa = solve_gap({&s.eps_alpha}, amin, 0.5 * (n_total + imb), temperature);
  const double xb = solve_gap({&s.eps_beta}, bmin, 0.5 * (n_total - imb), temperature);
  occ.mu_alpha = amin - xa;
  occ.mu_beta = bmin - xb;
  occ.mu = 0.5 * (occ.mu_alpha + occ.mu_beta);
  occ.delta_mu = 0.5 * (occ.mu_alpha - occ.mu_beta);
  for (double e : s.eps_alpha) occ.n_alpha.push_back(1.0 / std::expm1(((e - amin) + xa) / temperature));
  for (double e : s.eps_beta) occ.n_beta.push_back(1.0 / std::expm1(((e - bmin) + xb) / temperature));
  return occ;
}

Correlators correlators(const BogoliubovSpectrum& s, const OccupationSet& occ) {
  Correlators c;
  for (int i = 0; i < s.n_sites; ++i) {
    const double sin_sq = 0.5 * (1.0 - s.cos2[i]);
    const double cos_sq = 0.5 * (1.0 + s.cos2[i]);
    c.aa.push_back(sin_sq * occ.n_alpha[i] + cos_sq * occ.n_beta[i]);
    c.bb.push_back(cos_sq * occ.n_alpha[i] + sin_sq * occ.n_beta[i]);
    c.ab.push_back(0.5 * s.sin2[i] * (occ.n_alpha[i] - occ.n_beta[i]));
  }
  return c;
}

double default_wannier_width(int n_sites, double radius) {
  return 0.2 * 2.0 * radius * std::sin(kPi / n_sites);
}

double density_at(double kx, double ky, double kz, const BogoliubovSpectrum& s,
                  const Correlators& c, double radius, double separation, double sigma,
                  Component component) {
  using C = std::complex<double>;
  const int n = s.n_sites;
  // |sum_i exp(i(k.x_i + kappa phi_i))|^2 factorises the double site sum.
  std::vector<C> site(n);
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * kPi * i / n;
    site[i] = std::polar(1.0, radius * (kx * std::cos(phi) + ky * std::sin(phi)));
  }
  const C zphase = std::polar(1.0, kz * separation);
  double direct = 0.0;
  double cross = 0.0;
  for (int iq = 0; iq < n; ++iq) {
    const double ka = s.k_values[iq] + s.flux_a / n;
    const double kb = s.k_values[iq] + s.flux_b / n;
    C sa = 0.0;
    C sb = 0.0;
    for (int i = 0; i < n; ++i) {
      const double phi = 2.0 * kPi * i / n;
      sa += site[i] * std::polar(1.0, ka * phi);
      sb += site[i] * std::polar(1.0, kb * phi);
    }
    direct += std::norm(sa) * c.aa[iq] + std::norm(sb) * c.bb[iq];
    cross += 2.0 * std::real(zphase * sa * std::conj(sb)) * c.ab[iq];
  }
  double value = component == Component::Direct  ? direct
                 : component == Component::Cross ? cross
                                                 : direct + cross;
  const double k2 = kx * kx + ky * ky + kz * kz;
  return std::exp(-sigma * sigma * k2) * value / n;
}

MomentumImage momentum_density(const BogoliubovSpectrum& s, const OccupationSet& occ,
                               const ImageSpec& spec) {
  if (spec.pixels < 2) throw std::invalid_argument("image needs at least 2 pixels per side");
  if (!(spec.extent > 0.0) || !(spec.radius > 0.0)) {
    throw std::invalid_argument("image extent and ring radius must be positive");
  }
  const Correlators c = correlators(s, occ);
  MomentumImage img;
  img.plane = spec.plane;
  img.extent = spec.extent;
  img.pixels = spec.pixels;
  img.wannier_width = spec.wannier_width.value_or(default_wannier_width(s.n_sites, spec.radius));
  if (img.wannier_width < 0.0) throw std::invalid_argument("Wannier width must be non-negative");
  img.values.resize(static_cast<size_t>(spec.pixels) * spec.pixels);
  for (int r = 0; r < spec.pixels; ++r) {
    const double b = img.axis(r);
    for (int col = 0; col < spec.pixels; ++col) {
      const double a = img.axis(col);
      const double v = spec.plane == Plane::XY
                           ? density_at(a, b, 0.0, s, c, spec.radius, spec.separation,
                                        img.wannier_width, spec.component)
                           : density_at(0.0, a, b, s, c, spec.radius, spec.separation,
                                        img.wannier_width, spec.component);
      img.values[static_cast<size_t>(r) * spec.pixels + col] = v;
    }
  }
  return img;
}

int fringe_maxima(const MomentumImage& img, int window, double rel_threshold, double radius) {
  if (window < 3 || window % 2 == 0) throw std::invalid_argument("window must be odd and >= 3");
  const int p = img.pixels;
  const int h = window / 2;
  const double vmax = *std::max_element(img.values.begin(), img.values.end());
  const double rad = radius > 0.0 ? radius : img.extent;
  int count = 0;
  for (int r = 0; r < p; ++r) {
    for (int c = 0; c < p; ++c) {
      const double v = img.at(r, c);
      if (v <= rel_threshold * vmax) continue;
      if (std::hypot(img.axis(r), img.axis(c)) >= rad) continue;
      bool peak = true;
      for (int dr = -h; dr <= h && peak; ++dr) {
        for (int dc = -h; dc <= h; ++dc) {
          const int rr = std::clamp(r + dr, 0, p - 1);
          const int cc = std::clamp(c + dc, 0, p - 1);
          if (img.at(rr, cc) > v) {
            peak = false;
            break;
          }
        }
      }
      if (peak) ++count;
    }
  }
  return count;
}

double kz_modulation(double kx, double ky, const BogoliubovSpectrum& s, const Correlators& c,
                     double radius, double separation, int samples) {
  if (samples < 2) throw std::invalid_argument("need at least 2 samples");
  const double period = 2.0 * kPi / separation;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < samples; ++i) {
    const double kz = period * i / samples;
    const double v = density_at(kx, ky, kz, s, c, radius, separation, 0.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi + lo > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
}

}  // namespace ringqubit::tof
