#include "ringqubit/gates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ringqubit::gates {

namespace {

using C = std::complex<double>;
constexpr C kI(0.0, 1.0);

// Magic (Bell) basis used for the Makhlin invariants.
Gate2 magic_basis() {
  Gate2 q;
  const double r = 1.0 / std::sqrt(2.0);
  q << 1, 0, 0, kI, 0, kI, 1, 0, 0, kI, -1, 0, 1, 0, 0, -kI;
  return r * q;
}

}  // namespace

Gate1 u_z(double eps, double tau) {
  Gate1 u = Gate1::Zero();
  u(0, 0) = std::polar(1.0, eps * tau);
  u(1, 1) = std::polar(1.0, -eps * tau);
  return u;
}

Gate1 u_x(double alpha) {
  Gate1 u;
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  u << c, kI * s, kI * s, c;
  return u;
}

Gate1 pauli_x() {
  Gate1 x;
  x << 0, 1, 1, 0;
  return x;
}

Gate1 pauli_z() {
  Gate1 z;
  z << 1, 0, 0, -1;
  return z;
}

Gate1 hadamard() {
  Gate1 h;
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

Gate2 cnot() {
  Gate2 c = Gate2::Zero();
  c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
  return c;
}

Gate2 kron(const Gate1& a, const Gate1& b) {
  Gate2 k;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  }
  return k;
}

Gate2 xx_evolution(double coupling_ratio, double tau) {
  const double phi = coupling_ratio * tau;
  const Gate2 xx = kron(pauli_x(), pauli_x());
  return std::cos(phi) * Gate2::Identity() - kI * std::sin(phi) * xx;
}

Gate2 CoupledQubitHamiltonian::matrix() const {
  const Gate1 id = Gate1::Identity();
  return eps_a * kron(pauli_z(), id) + eps_b * kron(id, pauli_z()) + x_a * kron(pauli_x(), id) +
         x_b * kron(id, pauli_x()) + xx * kron(pauli_x(), pauli_x());
}

Gate2 CoupledQubitHamiltonian::evolve(double t) const {
  const Eigen::SelfAdjointEigenSolver<Gate2> es(matrix());
  Eigen::Vector4cd phases;
  for (int i = 0; i < 4; ++i) phases(i) = std::polar(1.0, -es.eigenvalues()(i) * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CoupledQubitHamiltonian coupled_hamiltonian(const spectrum::TwoLevelSystem& a,
                                            const spectrum::TwoLevelSystem& b, double flux,
                                            double delta, double coupling_ratio) {
  if (delta == 0.0) throw std::invalid_argument("barrier parameter delta must be non-zero");
  const double shift = (flux - std::numbers::pi) / delta + coupling_ratio * std::numbers::pi;
  CoupledQubitHamiltonian h;
  h.eps_a = a.gap;
  h.eps_b = b.gap;
  h.x_a = shift * a.theta01;
  h.x_b = shift * b.theta01;
  // Both qubits share the phase-slip matrix element in the printed coupling.
  h.xx = coupling_ratio * a.theta01 * b.theta01;
  return h;
}

double unitarity_error(const Eigen::MatrixXcd& u) {
  return (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).norm();
}

Makhlin makhlin_invariants(const Gate2& u) {
  const Gate2 q = magic_basis();
  const Gate2 ub = q.adjoint() * u * q;
  const Gate2 m = ub.transpose() * ub;
  const C det = u.determinant();
  const C tr = m.trace();
  const C tr2 = (m * m).trace();
  return {tr * tr / (16.0 * det), ((tr * tr - tr2) / (4.0 * det)).real()};
}

double phase_stripped_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const C overlap = (b.adjoint() * a).trace();
  const C phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : C(1.0, 0.0);
  return (a - phase * b).norm();
}

EquivalenceReport local_equivalence(const Gate2& a, const Gate2& b, double tol) {
  if (unitarity_error(a) > 1e-8 || unitarity_error(b) > 1e-8) {
    throw std::invalid_argument("local_equivalence needs unitary inputs");
  }
  EquivalenceReport r;
  r.distance = phase_stripped_distance(a, b);
  r.equal_up_to_phase = r.distance < tol;
  r.invariants_a = makhlin_invariants(a);
  r.invariants_b = makhlin_invariants(b);
  r.makhlin_match = std::abs(r.invariants_a.g1 - r.invariants_b.g1) < tol &&
                    std::abs(r.invariants_a.g2 - r.invariants_b.g2) < tol;
  return r;
}

Gate2 compose(const std::vector<CircuitStep>& steps) {
  Gate2 u = Gate2::Identity();
  for (const auto& s : steps) {
    Gate2 g;
    if (s.gate == "xx") {
      g = xx_evolution(s.coupling_ratio, s.tau);
    } else if (s.gate == "cnot") {
      g = cnot();
    } else if (s.gate == "identity") {
      g = Gate2::Identity();
    } else if (s.gate == "u_z" || s.gate == "u_x") {
      const Gate1 one = s.gate == "u_z" ? u_z(s.eps, s.tau) : u_x(s.alpha);
      if (s.qubits.size() != 1 || (s.qubits[0] != 0 && s.qubits[0] != 1)) {
        throw std::invalid_argument("single-qubit gate needs exactly one qubit index 0 or 1");
      }
      g = s.qubits[0] == 0 ? kron(one, Gate1::Identity()) : kron(Gate1::Identity(), one);
    } else {
      throw std::invalid_argument("unknown gate '" + s.gate + "'");
    }
    u = g * u;
  }
  return u;
}

}  // namespace ringqubit::gates
