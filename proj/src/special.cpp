#include "ringqubit/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ringqubit/error.hpp"

namespace ringqubit::special {

namespace {

constexpr double kPi = std::numbers::pi;

double agm(double a, double b) {
  for (int i = 0; i < 64; ++i) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    if (std::abs(an - bn) <= 1e-16 * an) return an;
    a = an;
    b = bn;
  }
  return 0.5 * (a + b);
}

}  // namespace

double elliptic_k(double m) {
  if (!(m >= 0.0) || m >= 1.0) throw std::invalid_argument("modulus out of range");
  return kPi / (2.0 * agm(1.0, std::sqrt(1.0 - m)));
}

// Carlson's duplication algorithm.
double carlson_rf(double x, double y, double z) {
  if (std::min({x, y, z}) < 0.0 || std::min({x + y, x + z, y + z}) == 0.0) {
    throw std::invalid_argument("carlson_rf: invalid arguments");
  }
  for (int i = 0; i < 200; ++i) {
    const double mu = (x + y + z) / 3.0;
    const double dx = 1.0 - x / mu;
    const double dy = 1.0 - y / mu;
    const double dz = 1.0 - z / mu;
    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < 1e-4) {
      const double e2 = dx * dy - dz * dz;
      const double e3 = dx * dy * dz;
      return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0 -
              5.0 * e2 * e2 * e2 / 208.0 + 3.0 * e3 * e3 / 104.0 + e2 * e2 * e3 / 16.0) /
             std::sqrt(mu);
    }
    const double sx = std::sqrt(x);
    const double sy = std::sqrt(y);
    const double sz = std::sqrt(z);
    const double lambda = sx * sy + sx * sz + sy * sz;
    x = 0.25 * (x + lambda);
    y = 0.25 * (y + lambda);
    z = 0.25 * (z + lambda);
  }
  throw NumericError("carlson_rf did not converge");
}

double elliptic_f(double phi, double m) {
  if (!(m >= 0.0) || m > 1.0) throw std::invalid_argument("modulus out of range");
  const double n = std::round(phi / kPi);
  const double r = phi - n * kPi;
  const double s = std::sin(r);
  const double c = std::cos(r);
  const double partial = s * carlson_rf(c * c, 1.0 - m * s * s, 1.0);
  if (n == 0.0) return partial;
  return 2.0 * n * elliptic_k(m) + partial;
}

JacobiSCD jacobi_scd(double u, double m) {
  if (!(m >= 0.0) || m > 1.0) throw std::invalid_argument("modulus out of range");
  if (m == 1.0) {
    const double sech = 1.0 / std::cosh(u);
    return {std::tanh(u), sech, sech};
  }
  if (m == 0.0) return {std::sin(u), std::cos(u), 1.0};

  const double quarter = elliptic_k(m);
  u = std::remainder(u, 4.0 * quarter);

  // Descending Landen / AGM scheme.
  constexpr int kMax = 32;
  std::array<double, kMax + 1> a{};
  std::array<double, kMax + 1> c{};
  a[0] = 1.0;
  double b = std::sqrt(1.0 - m);
  c[0] = std::sqrt(m);
  int n = 0;
  while (std::abs(c[n]) > 1e-16 * a[n] && n < kMax) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  for (int i = n; i > 0; --i) {
    phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  // Written as cn^2 + (1-m) sn^2 to keep accuracy as m -> 1.
  const double dn = std::sqrt(cn * cn + (1.0 - m) * sn * sn);
  return {sn, cn, dn};
}

CubicRoots cubic_roots(const CubicInvariants& inv) {
  const double g2 = inv.g2;
  const double g3 = inv.g3;
  CubicRoots out;
  out.discriminant = g2 * g2 * g2 - 27.0 * g3 * g3;

  // Depressed form y^3 + p y + q with p = -g2/4, q = -g3/4.
  const double p = -g2 / 4.0;
  const double q = -g3 / 4.0;
  auto polish = [&](double y) {
    for (int i = 0; i < 4; ++i) {
      const double f = 4.0 * y * y * y - g2 * y - g3;
      const double df = 12.0 * y * y - g2;
      if (df == 0.0) break;
      const double step = f / df;
      if (!std::isfinite(step)) break;
      y -= step;
      if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(y))) break;
    }
    return y;
  };

  if (g2 == 0.0 && g3 == 0.0) {
    out.e = {0.0, 0.0, 0.0};
    return out;
  }

  const double scale = std::max(std::abs(g2) * std::abs(g2) * std::abs(g2), 27.0 * g3 * g3);
  if (std::abs(out.discriminant) <= 1e-14 * scale) {
    // Repeated root: double root -3q/(2p), simple root 3q/p.
    const double dbl = -3.0 * q / (2.0 * p);
    const double sgl = 3.0 * q / p;
    std::array<double, 3> r{dbl, dbl, sgl};
    std::sort(r.begin(), r.end(), std::greater<>());
    out.e = {r[0], r[1], r[2]};
    out.discriminant = 0.0;
    return out;
  }

  if (out.discriminant > 0.0) {
    const double amp = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * amp), -1.0, 1.0);
    const double base = std::acos(arg) / 3.0;
    std::array<double, 3> r{};
    for (int k = 0; k < 3; ++k) r[k] = polish(amp * std::cos(base - 2.0 * kPi * k / 3.0));
    std::sort(r.begin(), r.end(), std::greater<>());
    // Vieta: the roots sum to zero; remove the rounding residue from the middle root.
    r[1] = -(r[0] + r[2]);
    out.e = {r[0], r[1], r[2]};
    return out;
  }

  out.all_real = false;
  const double sq = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  const double real = polish(std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq));
  // Remaining quadratic y^2 + real y + (real^2 + p).
  const double im = std::sqrt(std::max(0.0, 3.0 * real * real / 4.0 + p));
  out.e = {std::complex<double>(-real / 2.0, im), real, std::complex<double>(-real / 2.0, -im)};
  return out;
}

double weierstrass_p(double u, const CubicInvariants& inv) {
  return weierstrass_p(u, inv, cubic_roots(inv));
}

double weierstrass_p(double u, const CubicInvariants& inv, const CubicRoots& roots) {
  if (u == 0.0) throw std::invalid_argument("pole of \xE2\x84\x98");
  if (inv.g2 == 0.0 && inv.g3 == 0.0) return 1.0 / (u * u);

  if (roots.all_real) {
    const double e1 = roots.e1();
    const double e2 = roots.e2();
    const double e3 = roots.e3();
    const double spread = e1 - e3;
    const double m = std::clamp((e2 - e3) / spread, 0.0, 1.0);
    const double sn = jacobi_scd(u * std::sqrt(spread), m).sn;
    return e3 + spread / (sn * sn);
  }

  const double e2 = roots.e2();
  const double h2 = std::sqrt(3.0 * e2 * e2 - inv.g2 / 4.0);
  const double m = std::clamp(0.5 - 3.0 * e2 / (4.0 * h2), 0.0, 1.0);
  const JacobiSCD j = jacobi_scd(2.0 * u * std::sqrt(h2), m);
  if (j.cn >= 0.0) {
    // (1+c)/(1-c) = (1+c)^2/sn^2 avoids cancellation near the pole.
    const double num = 1.0 + j.cn;
    return e2 + h2 * num * num / (j.sn * j.sn);
  }
  return e2 + h2 * (1.0 + j.cn) / (1.0 - j.cn);
}

double weierstrass_real_period(const CubicInvariants& inv) {
  const CubicRoots roots = cubic_roots(inv);
  if (inv.g2 == 0.0 && inv.g3 == 0.0) return std::numeric_limits<double>::infinity();
  if (roots.all_real) {
    const double spread = roots.e1() - roots.e3();
    const double m = std::clamp((roots.e2() - roots.e3()) / spread, 0.0, 1.0);
    if (m >= 1.0) return std::numeric_limits<double>::infinity();
    return 2.0 * elliptic_k(m) / std::sqrt(spread);
  }
  const double e2 = roots.e2();
  const double h2 = std::sqrt(3.0 * e2 * e2 - inv.g2 / 4.0);
  const double m = std::clamp(0.5 - 3.0 * e2 / (4.0 * h2), 0.0, 1.0);
  return 2.0 * elliptic_k(m) / std::sqrt(h2);
}

}  // namespace ringqubit::special
