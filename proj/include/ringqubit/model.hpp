#pragma once

namespace ringqubit::model {

// Energies are in units of the intra-ring tunnelling t (hbar = 1) unless a
// field says otherwise; TrapGeometry is SI.

struct RingParams {
  int n_sites = 3;
  double t = 1.0;
  double t_prime = 0.0;  // weak link
  double u = 0.0;
  double flux = 0.0;  // total flux through the ring, radians
  double n_avg = 1.0;  // bosons per well

  void validate() const;
};

struct LadderParams {
  int n_sites = 3;
  double t = 1.0;
  double u = 0.0;
  double g = 0.0;  // inter-ring tunnelling
  double flux_a = 0.0;
  double flux_b = 0.0;
  double mu_a = 0.0;
  double mu_b = 0.0;

  void validate() const;
};

struct DerivedCouplings {
  double j = 0.0;
  double j_prime = 0.0;
  double j_tilde = 0.0;
  double delta_barrier = 0.0;
};

struct ReducedDynamicsParams {
  double drive = 0.0;  // Delta
  double lam = 0.0;  // U / (2 g)
  double rho = 1.0;  // bosons per site
  double g = 1.0;

  double lam_rho() const { return lam * rho; }
  void validate() const;
};

struct TrapGeometry {
  double wavelength = 0.0;
  double focal_length = 0.0;
  double beam_separation = 0.0;
  double ring_radius = 0.0;
  double stack_potential_depth = 0.0;  // in recoil energies of `wavelength`
  double atom_mass = 0.0;

  void validate() const;
};

DerivedCouplings derive_couplings(const RingParams& p);
// Both legs of a ladder are uniform rings, so J' = J.
DerivedCouplings derive_couplings(const LadderParams& p, double n_avg);

ReducedDynamicsParams reduced_dynamics_params(const LadderParams& p, double n_total);

double ring_separation(const TrapGeometry& geom);

// Rate in 1/s for a barrier v0 (J) of width d (m); hbar is explicit so the
// formula can be evaluated in any consistent unit system.
double wkb_inter_ring_tunnelling(double mass, double v0, double d, double hbar);
double wkb_inter_ring_tunnelling(const TrapGeometry& geom);

double recoil_energy(double wavelength, double mass);

double stacked_ring_potential(double phi, double z, int l, double f_pl, double k_lg, double k_g,
                              double e0);

// Zeeman shift in Hz across `separation` (m) in a gradient given in G/cm.
double raman_detuning_shift(double gradient_g_per_cm, double separation, double g_f, int delta_mf);

inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kBohrMagnetonHzPerGauss = 1.399625e6;

}  // namespace ringqubit::model
