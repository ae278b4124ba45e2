#pragma once

#include <complex>
#include <optional>
#include <vector>

namespace ringqubit::action {

struct SingleRingPotentialSpec {
  double j = 1.0;
  double j_prime = 0.0;
  int n_sites = 3;
  double flux = 0.0;

  void validate() const;
};

struct TwoRingPotentialSpec {
  double j = 1.0;
  double j_tilde = 0.0;
  int n_sites = 3;
  double flux_a = 0.0;
  double flux_b = 0.0;
  // Coupling in front of the two single-ring cosines. Unset means J, as in the
  // two-ring action; the two-qubit Lagrangian uses J' instead.
  std::optional<double> j_cos;

  void validate() const;
};

struct Extremum {
  double location;
  double value;
};

struct DoubleWellReport {
  std::vector<Extremum> minima;  // sorted by location
  double barrier = 0.0;  // highest point between the two minima of a two-level report
  bool is_two_level = false;
};

// Minimum of the 2D two-ring landscape.
struct Minimum2D {
  double theta_a;
  double theta_b;
  double value;
};

struct KernelSample {
  int l = 0;
  double omega_l = 0.0;
  double y_value = 0.0;
};

struct KernelSeries {
  std::vector<double> tau;
  std::vector<std::complex<double>> g_regular;  // sum_l (Y_l - Y_inf) e^{i w_l tau}
  double plateau = 0.0;  // Y_inf, the coefficient of the periodic delta comb
  int l_max = 0;
  double tail_bound = 0.0;
};

double potential_single(double theta, const SingleRingPotentialSpec& spec);
double potential_single_derivative(double theta, const SingleRingPotentialSpec& spec);

double potential_two(double theta_a, double theta_b, const TwoRingPotentialSpec& spec);

// Minima of the single-ring potential on [flux - 2 pi, flux + 2 pi].
DoubleWellReport find_double_well(const SingleRingPotentialSpec& spec, int grid_points = 4096);

// Two-ring report on the cut theta_a = c + s, theta_b = -(c + s) with c = (flux_a - flux_b)/2;
// locations are reported as theta_a.
DoubleWellReport find_double_well(const TwoRingPotentialSpec& spec, int grid_points = 4096);

std::vector<Minimum2D> find_minima_2d(const TwoRingPotentialSpec& spec, int grid_points = 256);

double matsubara_frequency(int l, double beta);
double kernel_admittance(double omega, const SingleRingPotentialSpec& spec, double u);
KernelSample kernel_admittance(int l, double beta, const SingleRingPotentialSpec& spec, double u);
double kernel_plateau(const SingleRingPotentialSpec& spec);

// G(tau) on a tau grid. The plateau Y_inf makes the raw series a delta comb, so the
// regular remainder is summed up to l_max; throws if its tail bound exceeds
// tol times the largest partial sum, suggesting the l_max that would suffice.
KernelSeries kernel_series(const SingleRingPotentialSpec& spec, double u, double beta,
                           const std::vector<double>& tau, int l_max, double tol = 1e-8);

}  // namespace ringqubit::action
