#include "ringqubit/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ringqubit::model {

void RingParams::validate() const {
  if (n_sites < 3) throw std::invalid_argument("ring needs at least 3 sites");
  if (!(t > 0.0)) throw std::invalid_argument("tunnelling t must be positive");
  if (!(t_prime >= 0.0)) throw std::invalid_argument("weak-link tunnelling must be non-negative");
  if (!(n_avg > 0.0)) throw std::invalid_argument("mean filling must be positive");
  if (!(u >= 0.0)) throw std::invalid_argument("interaction U must be non-negative");
}

void LadderParams::validate() const {
  if (n_sites < 3) throw std::invalid_argument("ring needs at least 3 sites");
  if (!(t > 0.0)) throw std::invalid_argument("tunnelling t must be positive");
  if (!(g >= 0.0)) throw std::invalid_argument("inter-ring tunnelling must be non-negative");
}

void ReducedDynamicsParams::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (!(g > 0.0)) throw std::invalid_argument("g must be positive");
  if (!(lam >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
}

void TrapGeometry::validate() const {
  if (!(wavelength > 0.0) || !(focal_length > 0.0) || !(beam_separation > 0.0) ||
      !(ring_radius > 0.0) || !(stack_potential_depth > 0.0) || !(atom_mass > 0.0)) {
    throw std::invalid_argument("trap geometry entries must be strictly positive");
  }
}

DerivedCouplings derive_couplings(const RingParams& p) {
  p.validate();
  DerivedCouplings c;
  c.j = p.n_avg * p.t;
  c.j_prime = p.n_avg * p.t_prime;
  c.delta_barrier = c.j_prime * (p.n_sites - 1) / (2.0 * c.j);
  return c;
}

DerivedCouplings derive_couplings(const LadderParams& p, double n_avg) {
  p.validate();
  if (!(n_avg > 0.0)) throw std::invalid_argument("mean filling must be positive");
  DerivedCouplings c;
  c.j = n_avg * p.t;
  c.j_prime = c.j;
  c.j_tilde = n_avg * p.g;
  c.delta_barrier = c.j_prime * (p.n_sites - 1) / (2.0 * c.j);
  return c;
}

ReducedDynamicsParams reduced_dynamics_params(const LadderParams& p, double n_total) {
  p.validate();
  if (p.g == 0.0) throw std::invalid_argument("decoupled rings: reduced parameters undefined");
  if (!(n_total > 0.0)) throw std::invalid_argument("total atom number must be positive");
  const double n = p.n_sites;
  ReducedDynamicsParams r;
  // Sign fixed by the amplitude equations with z = (N_b - N_a)/N_T, Theta = theta_a - theta_b.
  r.drive = (2.0 * p.t * (std::cos(p.flux_a / n) - std::cos(p.flux_b / n)) + p.mu_a - p.mu_b) /
            (2.0 * p.g);
  r.lam = p.u / (2.0 * p.g);
  r.rho = n_total / n;
  r.g = p.g;
  return r;
}

double ring_separation(const TrapGeometry& geom) {
  if (!(geom.wavelength > 0.0) || !(geom.focal_length > 0.0) || !(geom.beam_separation > 0.0)) {
    throw std::invalid_argument("ring separation needs positive wavelength, focal length and D");
  }
  return geom.wavelength * geom.focal_length / geom.beam_separation;
}

double wkb_inter_ring_tunnelling(double mass, double v0, double d, double hbar) {
  if (!(v0 > 0.0)) throw std::invalid_argument("zero barrier depth");
  if (!(d > 0.0) || !(mass > 0.0) || !(hbar > 0.0)) {
    throw std::invalid_argument("tunnelling needs positive mass, width and hbar");
  }
  const double prefactor = 4.0 * std::sqrt(1.0 / (hbar * std::sqrt(2.0 * mass)));
  return prefactor * std::pow(v0, 0.75) / std::sqrt(d) *
         std::exp(-std::sqrt(2.0 * mass * v0) * d / (std::numbers::pi * hbar));
}

double recoil_energy(double wavelength, double mass) {
  const double k = 2.0 * std::numbers::pi / wavelength;
  return kHbar * kHbar * k * k / (2.0 * mass);
}

double wkb_inter_ring_tunnelling(const TrapGeometry& geom) {
  geom.validate();
  const double v0 = geom.stack_potential_depth * recoil_energy(geom.wavelength, geom.atom_mass);
  return wkb_inter_ring_tunnelling(geom.atom_mass, v0, ring_separation(geom), kHbar);
}

double stacked_ring_potential(double phi, double z, int l, double f_pl, double k_lg, double k_g,
                              double e0) {
  const double a = std::cos(k_lg * z);
  const double b = std::cos(k_g * z);
  return 4.0 * e0 * e0 *
         (f_pl * f_pl * a * a + b * b + 2.0 * f_pl * a * b * std::cos(phi * l));
}

double raman_detuning_shift(double gradient_g_per_cm, double separation, double g_f, int delta_mf) {
  if (gradient_g_per_cm < 0.0 || separation < 0.0) {
    throw std::invalid_argument("gradient and separation must be non-negative");
  }
  const double field_gauss = gradient_g_per_cm * separation * 100.0;
  return kBohrMagnetonHzPerGauss * g_f * delta_mf * field_gauss;
}

}  // namespace ringqubit::model
