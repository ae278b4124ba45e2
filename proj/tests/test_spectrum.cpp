#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ringqubit/spectrum.hpp"

using namespace ringqubit::spectrum;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

QuantizedWellSpec well(double u, double j_prime, double delta, int n = 10, double flux = kPi) {
  QuantizedWellSpec s;
  s.u = u;
  s.j_prime = j_prime;
  s.n_sites = n;
  s.j = j_prime * (n - 1) / (2.0 * delta);
  s.flux = flux;
  return s;
}

double quad(const std::vector<double>& a, const std::vector<double>& b, double h) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return h * s;
}

// Dense symmetric matrix of the same operator on the same grid, diagonalised by Eigen.
Eigen::VectorXd dense_levels(const QuantizedWellSpec& s, int m) {
  const double hw = s.domain_halfwidth;
  const double h = 2.0 * hw / (m + 1);
  const double c[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const double th = s.flux - hw + (i + 1) * h;
    a(i, i) = -0.5 * s.u * c[0] / (h * h) + s.j / (s.n_sites - 1) * (th - s.flux) * (th - s.flux) -
              s.j_prime * std::cos(th);
    for (int k = 1; k <= 4; ++k) {
      if (i + k < m) a(i, i + k) = a(i + k, i) = -0.5 * s.u * c[k] / (h * h);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(4);
}
}  // namespace

TEST_CASE("gap against a dense eigensolver on the same grid") {
  auto s = well(0.05, 1.0, 2.0);
  const int m = 1024;
  auto t = solve_on_grid(s, m);
  auto ev = dense_levels(s, m);
  for (int i = 0; i < 4; ++i) CHECK(t.energies[i] == Approx(ev(i)).epsilon(1e-10));
  CHECK(std::abs(t.gap - 0.5 * (ev(1) - ev(0))) < 1e-9 * std::max(1.0, std::abs(ev(0))));
  CHECK(std::abs(t.gap - 0.5 * (ev(1) - ev(0))) < 1e-6 * t.gap);
}

TEST_CASE("parity and matrix elements at half flux") {
  auto s = well(0.05, 1.0, 2.0);
  auto t = quantize_double_well(s);
  const double h = t.grid_step;
  const size_t n = t.theta.size();
  std::vector<double> r0(n), r1(n), x(n);
  // theta grid is symmetric about pi, so reflection is index reversal
  for (size_t i = 0; i < n; ++i) {
    CHECK(t.theta[i] - kPi == Approx(kPi - t.theta[n - 1 - i]).epsilon(1e-12).scale(1.0));
    r0[i] = t.psi0[n - 1 - i];
    r1[i] = t.psi1[n - 1 - i];
    x[i] = (t.theta[i] - kPi) * t.psi0[i];
  }
  CHECK(quad(t.psi0, r0, h) == Approx(1.0).epsilon(1e-8));
  CHECK(quad(t.psi1, r1, h) == Approx(-1.0).epsilon(1e-8));
  CHECK(std::abs(quad(x, t.psi0, h)) < 1e-10);
  CHECK(t.theta01 > 0.1);
  CHECK(t.energies[0] < t.energies[1]);
  CHECK(t.energies[1] <= t.energies[2]);
  CHECK(t.gap == Approx(0.5 * (t.energies[1] - t.energies[0])));

  const std::vector<const std::vector<double>*> psi{&t.psi0, &t.psi1, &t.psi2, &t.psi3};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(std::abs(quad(*psi[i], *psi[j], h) - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("grid refinement") {
  auto s = well(1.0, 1.0, 2.0);
  auto t = quantize_double_well(s);
  CHECK(t.gap_change / t.gap < 1e-6);
  auto coarse = solve_on_grid(s, t.grid_points / 2);
  CHECK(std::abs(coarse.gap - t.gap) / t.gap < 1e-6);
  s.grid_points = 100;
  CHECK_THROWS_AS(quantize_double_well(s), std::invalid_argument);
}

TEST_CASE("kinetic term in the effective-mass form") {
  // J' P^2 / (2 mu) with mu = J'/U is the (U/2) P^2 used by the solver
  for (double jp : {0.5, 1.0, 4.0}) {
    for (double u : {0.05, 1.0}) {
      const double mu = jp / u;
      CHECK(jp / (2.0 * mu) == Approx(u / 2.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("gap decreases as the weak link closes") {
  // fixed U, J, N: raising J' walks delta from 1.5 to 6
  const double u = 1.0;
  const int n = 10;
  const double j = 1.5;
  double prev = 1e300;
  for (double delta = 1.5; delta <= 6.0 + 1e-12; delta += 0.5) {
    QuantizedWellSpec s;
    s.u = u;
    s.n_sites = n;
    s.j = j;
    s.j_prime = 2.0 * delta * j / (n - 1);
    s.flux = kPi;
    const double gap = quantize_double_well(s).gap;
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("WKB gap") {
  CHECK_THROWS_WITH_AS(wkb_gap(1.0, 1.0, 1.0), "no double well in WKB regime", std::invalid_argument);
  CHECK_THROWS_AS(wkb_gap(1.0, 1.0, 0.5), std::invalid_argument);
  const double d = 2.0;
  CHECK(wkb_gap(1.0, 1.0, d) == Approx(2.0 / kPi * std::sqrt(0.5) * std::exp(-12.0 * std::pow(0.5, 1.5))));
  CHECK(wkb_gap(1.0, 1.0, 1.0 + 1e-10) < 1e-4);
  double prev = wkb_gap(1.0, 1.0, d);
  for (double r = 2.0; r < 200.0; r *= 2.0) {
    const double cur = wkb_gap(1.0, r, d);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(prev < 1e-20);
}

TEST_CASE("Pauli reduction") {
  TwoLevelSystem t;
  t.gap = 0.3;
  t.theta01 = 1.5;
  auto h = pauli_reduction(t, kPi, 2.0);
  CHECK(h.eps_x == 0.0);
  CHECK(h.eps_z == 0.3);
  h = pauli_reduction(t, kPi + 0.01, 2.0);
  CHECK(h.eps_x == Approx(0.0075).epsilon(1e-12));
  CHECK(pauli_reduction(t, kPi - 0.01, 2.0).eps_x == Approx(-0.0075).epsilon(1e-12));
  auto m = h.matrix();
  CHECK(m(0, 0).real() == 0.3);
  CHECK(m(1, 1).real() == -0.3);
  CHECK(m(0, 1) == m(1, 0));
  CHECK((m - m.adjoint()).norm() == 0.0);
}
