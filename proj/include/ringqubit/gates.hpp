#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ringqubit/spectrum.hpp"

namespace ringqubit::gates {

using Gate1 = Eigen::Matrix2cd;
using Gate2 = Eigen::Matrix4cd;

Gate1 u_z(double eps, double tau);
Gate1 u_x(double alpha);
// exp[-i r tau sigma_x (x) sigma_x]
Gate2 xx_evolution(double coupling_ratio, double tau);

Gate1 pauli_x();
Gate1 pauli_z();
Gate1 hadamard();
Gate2 cnot();
Gate2 kron(const Gate1& a, const Gate1& b);

struct CoupledQubitHamiltonian {
  double eps_a = 0.0;
  double eps_b = 0.0;
  double x_a = 0.0;
  double x_b = 0.0;
  double xx = 0.0;

  Gate2 matrix() const;
  // exp(-i H t) through the hermitian eigendecomposition.
  Gate2 evolve(double t) const;
};

CoupledQubitHamiltonian coupled_hamiltonian(const spectrum::TwoLevelSystem& a,
                                            const spectrum::TwoLevelSystem& b, double flux,
                                            double delta, double coupling_ratio);

double unitarity_error(const Eigen::MatrixXcd& u);

struct Makhlin {
  std::complex<double> g1;
  double g2;
};
Makhlin makhlin_invariants(const Gate2& u);

// min over global phases of ||a - e^{i phi} b||_F
double phase_stripped_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

struct EquivalenceReport {
  bool equal_up_to_phase = false;
  bool makhlin_match = false;
  double distance = 0.0;
  Makhlin invariants_a;
  Makhlin invariants_b;
};
EquivalenceReport local_equivalence(const Gate2& a, const Gate2& b, double tol = 1e-10);

// Circuit steps applied left to right (the first listed acts first).
struct CircuitStep {
  std::string gate;  // u_z, u_x, xx, cnot, identity
  std::vector<int> qubits;  // single-qubit gates act on qubit 0 or 1
  double eps = 0.0;
  double tau = 0.0;
  double alpha = 0.0;
  double coupling_ratio = 1.0;
};
Gate2 compose(const std::vector<CircuitStep>& steps);

}  // namespace ringqubit::gates
