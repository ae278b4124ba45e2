#include "ringqubit/spectrum.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ringqubit/error.hpp"

namespace ringqubit::spectrum {

namespace {

constexpr int kBand = 4;
// Eighth-order central second difference.
constexpr std::array<double, kBand + 1> kStencil = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0,
                                                    8.0 / 315.0, -1.0 / 560.0};

struct Grid {
  int n;
  double h;
  double x0;
  std::vector<double> theta;
  std::vector<double> v;
};

Grid make_grid(const QuantizedWellSpec& spec, int n) {
  Grid g;
  g.n = n;
  g.h = 2.0 * spec.domain_halfwidth / (n + 1);
  g.x0 = spec.flux - spec.domain_halfwidth;
  g.theta.resize(n);
  g.v.resize(n);
  for (int i = 0; i < n; ++i) {
    g.theta[i] = g.x0 + (i + 1) * g.h;
    g.v[i] = well_potential(g.theta[i], spec);
  }
  return g;
}

double off_diagonal(const QuantizedWellSpec& spec, const Grid& g, int k) {
  return -0.5 * spec.u * kStencil[k] / (g.h * g.h);
}

void apply(const QuantizedWellSpec& spec, const Grid& g, const std::vector<double>& x,
           std::vector<double>& y) {
  const int n = g.n;
  y.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = (g.v[i] + off_diagonal(spec, g, 0)) * x[i];
    for (int k = 1; k <= kBand; ++k) {
      const double c = off_diagonal(spec, g, k);
      if (i - k >= 0) s += c * x[i - k];
      if (i + k < n) s += c * x[i + k];
    }
    y[i] = s;
  }
}

std::vector<double> lowest_eigenvalues(const QuantizedWellSpec& spec, const Grid& g, int count) {
  const int n = g.n;
  const int ldab = kBand + 1;
  std::vector<double> ab(static_cast<size_t>(ldab) * n, 0.0);
  // Upper band storage, column major: ab[kd + i - j + j * ldab] = A(i, j).
  for (int j = 0; j < n; ++j) {
    for (int i = std::max(0, j - kBand); i <= j; ++i) {
      const int k = j - i;
      const double a = k == 0 ? g.v[j] + off_diagonal(spec, g, 0) : off_diagonal(spec, g, k);
      ab[static_cast<size_t>(kBand + i - j) + static_cast<size_t>(j) * ldab] = a;
    }
  }
  std::vector<double> w(n);
  std::vector<lapack_int> ifail(n);
  lapack_int found = 0;
  double q_dummy = 0.0;
  double z_dummy = 0.0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const lapack_int info =
      LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'U', n, kBand, ab.data(), ldab, &q_dummy, 1, 0.0,
                     0.0, 1, count, abstol, &found, w.data(), &z_dummy, 1, ifail.data());
  if (info != 0 || found != count) {
    throw NumericError("banded eigensolver failed (info " + std::to_string(info) + ")");
  }
  w.resize(count);
  return w;
}

class BandedShiftedSolver {
 public:
  BandedShiftedSolver(const QuantizedWellSpec& spec, const Grid& g, double shift)
      : n_(g.n), ldab_(2 * kBand + kBand + 1), ab_(static_cast<size_t>(ldab_) * n_, 0.0),
        ipiv_(n_) {
    for (int j = 0; j < n_; ++j) {
      for (int i = std::max(0, j - kBand); i <= std::min(n_ - 1, j + kBand); ++i) {
        const int k = std::abs(i - j);
        const double a =
            k == 0 ? g.v[j] + off_diagonal(spec, g, 0) - shift : off_diagonal(spec, g, k);
        ab_[static_cast<size_t>(2 * kBand + i - j) + static_cast<size_t>(j) * ldab_] = a;
      }
    }
    const lapack_int info =
        LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kBand, kBand, ab_.data(), ldab_, ipiv_.data());
    if (info < 0) throw NumericError("banded LU failed");
    singular_ = info > 0;
  }

  bool singular() const { return singular_; }

  void solve(std::vector<double>& rhs) const {
    const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kBand, kBand, 1, ab_.data(),
                                           ldab_, ipiv_.data(), rhs.data(), n_);
    if (info != 0) throw NumericError("banded solve failed");
  }

 private:
  int n_;
  int ldab_;
  std::vector<double> ab_;
  std::vector<lapack_int> ipiv_;
  bool singular_ = false;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void orthonormalise(std::vector<std::vector<double>>& vs, size_t from) {
  for (size_t i = from; i < vs.size(); ++i) {
    for (int pass = 0; pass < 2; ++pass) {
      for (size_t k = 0; k < i; ++k) {
        const double c = dot(vs[k], vs[i]);
        for (size_t p = 0; p < vs[i].size(); ++p) vs[i][p] -= c * vs[k][p];
      }
    }
    const double nrm = std::sqrt(dot(vs[i], vs[i]));
    for (auto& x : vs[i]) x /= nrm;
  }
}

// Rounding level of the operator, used both as the residual target and as the
// floor below which gap changes under refinement are noise.
double spectral_tolerance(const QuantizedWellSpec& spec, const Grid& g) {
  double vmax = 0.0;
  for (double v : g.v) vmax = std::max(vmax, std::abs(v));
  const double kinetic = 0.5 * spec.u * 16.0 / (g.h * g.h);
  return 64.0 * std::numeric_limits<double>::epsilon() * (kinetic + vmax);
}

// Subspace inverse iteration for a near-degenerate pair followed by a 2x2
// Rayleigh-Ritz step, so tiny tunnel splittings are resolved cleanly.
void pair_vectors(const QuantizedWellSpec& spec, const Grid& g, double lo, double hi,
                  std::vector<std::vector<double>>& basis) {
  const double spread = std::max(hi - lo, 1e-300);
  double shift = 0.5 * (lo + hi);
  BandedShiftedSolver solver(spec, g, shift);
  if (solver.singular()) {
    shift += 1e-3 * spread;
    solver = BandedShiftedSolver(spec, g, shift);
  }
  const size_t base = basis.size();
  const int n = g.n;
  const double center = spec.flux;
  basis.emplace_back(n);
  basis.emplace_back(n);
  for (int i = 0; i < n; ++i) {
    const double x = (g.theta[i] - center) / spec.domain_halfwidth;
    basis[base][i] = 1.0 + 0.1 * x;
    basis[base + 1][i] = x + 0.1;
  }
  orthonormalise(basis, base);
  std::vector<double> h0;
  std::vector<double> h1;
  const double tol = spectral_tolerance(spec, g);
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 80; ++it) {
    solver.solve(basis[base]);
    solver.solve(basis[base + 1]);
    orthonormalise(basis, base);
    apply(spec, g, basis[base], h0);
    apply(spec, g, basis[base + 1], h1);
    Eigen::Matrix2d r;
    r(0, 0) = dot(basis[base], h0);
    r(1, 1) = dot(basis[base + 1], h1);
    r(0, 1) = r(1, 0) = 0.5 * (dot(basis[base], h1) + dot(basis[base + 1], h0));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(r);
    const Eigen::Matrix2d c = es.eigenvectors();
    std::vector<double> a(n);
    std::vector<double> b(n);
    double res = 0.0;
    for (int k = 0; k < 2; ++k) {
      double rr = 0.0;
      for (int i = 0; i < n; ++i) {
        const double v = c(0, k) * basis[base][i] + c(1, k) * basis[base + 1][i];
        const double hv = c(0, k) * h0[i] + c(1, k) * h1[i];
        const double d = hv - es.eigenvalues()(k) * v;
        rr += d * d;
        (k == 0 ? a : b)[i] = v;
      }
      res = std::max(res, std::sqrt(rr));
    }
    basis[base] = std::move(a);
    basis[base + 1] = std::move(b);
    orthonormalise(basis, base);
    if (it >= 3 && (res < tol || res >= 0.9 * previous)) break;
    previous = res;
  }
}

void fix_sign(std::vector<double>& psi, const std::vector<double>& weight) {
  double s = dot(psi, weight);
  if (s == 0.0) s = std::accumulate(psi.begin(), psi.end(), 0.0);
  if (s < 0.0) {
    for (auto& x : psi) x = -x;
  }
}


}  // namespace

void QuantizedWellSpec::validate() const {
  if (!(u > 0.0)) throw std::invalid_argument("interaction U must be positive to quantize");
  if (!(j > 0.0)) throw std::invalid_argument("J must be positive");
  if (!(j_prime >= 0.0)) throw std::invalid_argument("J' must be non-negative");
  if (n_sites < 3) throw std::invalid_argument("ring needs at least 3 sites");
  if (grid_points < 512) throw std::invalid_argument("grid_points must be at least 512");
  if (!(domain_halfwidth > 0.0)) throw std::invalid_argument("domain half-width must be positive");
}

double well_potential(double theta, const QuantizedWellSpec& spec) {
  const double x = theta - spec.flux;
  return spec.j / (spec.n_sites - 1) * x * x - spec.j_prime * std::cos(theta);
}

TwoLevelSystem solve_on_grid(const QuantizedWellSpec& spec, int grid_points) {
  spec.validate();
  const Grid g = make_grid(spec, grid_points);
  const std::vector<double> e = lowest_eigenvalues(spec, g, 5);

  std::vector<std::vector<double>> basis;
  pair_vectors(spec, g, e[0], e[1], basis);
  pair_vectors(spec, g, e[2], e[3], basis);
  // At flux = 0 or pi the grid and the potential are mirror symmetric: state k
  // has parity (-1)^k, so project out the rounding-level admixture of its partner.
  if (std::abs(std::remainder(spec.flux, std::numbers::pi)) < 1e-14) {
    for (int k = 0; k < 4; ++k) {
      auto& v = basis[k];
      const double sgn = k % 2 == 0 ? 1.0 : -1.0;
      for (int i = 0, j = g.n - 1; i < j; ++i, --j) {
        const double a = 0.5 * (v[i] + sgn * v[j]);
        v[i] = a;
        v[j] = sgn * a;
      }
      if (g.n % 2 == 1 && sgn < 0.0) v[g.n / 2] = 0.0;
    }
  }
  orthonormalise(basis, 0);

  TwoLevelSystem tls;
  tls.grid_points = grid_points;
  tls.grid_step = g.h;
  tls.theta = g.theta;
  for (int i = 0; i < 4; ++i) tls.energies[i] = e[i];
  tls.gap = 0.5 * (e[1] - e[0]);

  const std::vector<double> ones(g.n, 1.0);
  std::vector<double> odd(g.n);
  for (int i = 0; i < g.n; ++i) odd[i] = g.theta[i] - spec.flux;
  const double scale = 1.0 / std::sqrt(g.h);
  for (int k = 0; k < 4; ++k) {
    for (auto& x : basis[k]) x *= scale;
    fix_sign(basis[k], k % 2 == 0 ? ones : odd);
  }
  tls.psi0 = std::move(basis[0]);
  tls.psi1 = std::move(basis[1]);
  tls.psi2 = std::move(basis[2]);
  tls.psi3 = std::move(basis[3]);

  double m01 = 0.0;
  for (int i = 0; i < g.n; ++i) m01 += tls.psi0[i] * (g.theta[i] - std::numbers::pi) * tls.psi1[i];
  tls.theta01 = std::abs(m01 * g.h);
  return tls;
}

TwoLevelSystem quantize_double_well(const QuantizedWellSpec& spec) {
  spec.validate();
  int n = spec.grid_points;
  TwoLevelSystem prev = solve_on_grid(spec, n);
  double last_change = std::numeric_limits<double>::infinity();
  while (2 * n <= spec.max_grid_points) {
    n *= 2;
    TwoLevelSystem next = solve_on_grid(spec, n);
    const double change = std::abs(next.gap - prev.gap);
    const double floor = spectral_tolerance(spec, make_grid(spec, n));
    next.gap_change = change;
    if (change < std::max(spec.rel_tol * std::abs(next.gap), floor)) return next;
    prev = std::move(next);
    last_change = change;
  }
  std::ostringstream os;
  os << "gap did not converge up to " << n << " grid points (last change " << last_change
     << ", gap " << prev.gap << ")";
  throw NumericError(os.str());
}

double wkb_gap(double u, double j_prime, double delta) {
  if (!(delta > 1.0)) throw std::invalid_argument("no double well in WKB regime");
  if (!(u > 0.0) || !(j_prime > 0.0)) throw std::invalid_argument("U and J' must be positive");
  const double s = 1.0 - 1.0 / delta;
  return 2.0 * std::sqrt(u * j_prime) / std::numbers::pi * std::sqrt(s) *
         std::exp(-12.0 * std::sqrt(j_prime / u) * std::pow(s, 1.5));
}

QubitPauliHamiltonian pauli_reduction(const TwoLevelSystem& tls, double flux, double delta) {
  if (delta == 0.0) throw std::invalid_argument("barrier parameter delta must be non-zero");
  return {tls.gap, (flux - std::numbers::pi) / delta * tls.theta01};
}

Eigen::Matrix2cd QubitPauliHamiltonian::matrix() const {
  Eigen::Matrix2cd h;
  h << eps_z, eps_x, eps_x, -eps_z;
  return h;
}

}  // namespace ringqubit::spectrum
