#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "ringqubit/model.hpp"
#include "ringqubit/special.hpp"

// Two-mode condensate dynamics in the rescaled time s~ = 2 g s.
namespace ringqubit::dynamics {

using model::ReducedDynamicsParams;

struct GPState {
  double z = 0.0;  // (N_b - N_a) / N_T
  double theta = 0.0;  // theta_a - theta_b, unwrapped
};

struct Derivative {
  double dz;
  double dtheta;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<GPState> states;
  std::vector<double> energy;
  double energy_drift = 0.0;
  double dt = 0.0;  // step actually used after halving
};

Derivative gp_rhs(const GPState& s, const ReducedDynamicsParams& p);
double conserved_energy(const GPState& s, const ReducedDynamicsParams& p);

// Fixed-step RK4, halving the step until max|H - H0| < 1e-10 max(1, |H0|).
// Every `stride`-th step is recorded (the final time always is).
Trajectory integrate(const GPState& initial, const ReducedDynamicsParams& p, double t_end,
                     double dt, int stride = 1);

// Direct integration of the complex amplitude equations in physical time s,
// sampled at s~ = 2 g s grid points.
struct TwoModeSample {
  double s_tilde;
  std::complex<double> phi_a;
  std::complex<double> phi_b;
};
struct TwoModeTrajectory {
  std::vector<TwoModeSample> samples;
  double max_number_drift = 0.0;  // max |N_a + N_b - N_T| / N_T
};
TwoModeTrajectory integrate_two_mode(const model::LadderParams& p, double n_total,
                                     const GPState& initial, double t_end_tilde, double dt_tilde,
                                     int stride = 1);
GPState reduce(const TwoModeSample& s);

enum class Delta0Branch { Constant, Cn, Sech, Dn };

struct Delta0Modulus {
  double m = 0.0;  // elliptic parameter k of the cn form; k > 1 selects dn with 1/k
  double c_squared = 0.0;
  double zeta_squared = 0.0;
  double h0 = 0.0;
  Delta0Branch branch = Delta0Branch::Constant;
};

Delta0Modulus modulus_delta0(const ReducedDynamicsParams& p, const GPState& initial);
double analytic_delta0(double s_tilde, const ReducedDynamicsParams& p, const GPState& initial);

struct QuarticData {
  std::array<double, 4> a{};  // a1..a4 of f = -z^4 + 4a1 z^3 + 6a2 z^2 + 4a3 z + a4
  double h0 = 0.0;
  double z1 = 0.0;
  double s0 = 0.0;  // z(s0) = z1
  std::vector<double> real_roots;  // ascending
  special::CubicInvariants invariants;
  special::CubicRoots cubic;

  double f(double z) const;
  double df(double z) const;
  double d2f(double z) const;
};

QuarticData quartic_data(const ReducedDynamicsParams& p, const GPState& initial);

double analytic_weierstrass(double s_tilde, const ReducedDynamicsParams& p, const GPState& initial);
double analytic_weierstrass(double s_tilde, const ReducedDynamicsParams& p, const QuarticData& q);
// The same solution written directly in Jacobi functions of the cubic roots:
// the sn form needs a positive discriminant, the cn form a negative one.
double analytic_jacobi_sn_form(double s_tilde, const ReducedDynamicsParams& p,
                               const QuarticData& q);
double analytic_jacobi_cn_form(double s_tilde, const ReducedDynamicsParams& p,
                               const QuarticData& q);

struct RegimeReport {
  bool drive_zero = false;
  double modulus = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
  double discriminant = 0.0;
  std::vector<double> quartic_roots;
  std::string label;  // constant, rabi-like, critical, mqst, exponential-decay
  double omega = 0.0;  // physical-time angular frequency
  double z_bar = 0.0;
};

RegimeReport classify_regime(const ReducedDynamicsParams& p, const GPState& initial);

// Small lambda*rho estimates, physical time.
double omega0_small_coupling(const ReducedDynamicsParams& p, double z0);
double omega_drive_small_coupling(const ReducedDynamicsParams& p, double z0);

// Angular frequency of the strongest non-DC component of uniformly sampled data.
double dominant_frequency(std::span<const double> samples, double dt);

}  // namespace ringqubit::dynamics
