#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace ringqubit::spectrum {

struct QuantizedWellSpec {
  double u = 0.0;
  double j = 1.0;
  double j_prime = 0.0;
  int n_sites = 3;
  double flux = 0.0;
  int grid_points = 1024;  // interior points, doubled until converged
  double domain_halfwidth = 6.283185307179586;
  int max_grid_points = 1 << 17;
  double rel_tol = 1e-8;

  void validate() const;
};

struct TwoLevelSystem {
  double gap = 0.0;  // half the E1 - E0 splitting
  double theta01 = 0.0;  // |<psi0|theta - pi|psi1>|
  std::array<double, 4> energies{};
  std::vector<double> theta;
  std::vector<double> psi0;  // normalised with the grid quadrature h * sum
  std::vector<double> psi1;
  std::vector<double> psi2;
  std::vector<double> psi3;
  int grid_points = 0;
  double grid_step = 0.0;
  double gap_change = 0.0;  // |gap(M) - gap(M/2)| at the accepted grid
};

struct QubitPauliHamiltonian {
  double eps_z = 0.0;
  double eps_x = 0.0;

  Eigen::Matrix2cd matrix() const;
};

// One solve on `grid_points` interior points, no refinement.
TwoLevelSystem solve_on_grid(const QuantizedWellSpec& spec, int grid_points);

// Grid doubling until the gap is stable to rel_tol (or to the rounding floor of
// the eigensolver, whichever is larger).
TwoLevelSystem quantize_double_well(const QuantizedWellSpec& spec);

double well_potential(double theta, const QuantizedWellSpec& spec);

double wkb_gap(double u, double j_prime, double delta);

QubitPauliHamiltonian pauli_reduction(const TwoLevelSystem& tls, double flux, double delta);

}  // namespace ringqubit::spectrum
