#pragma once

#include <array>
#include <complex>

// Elliptic kernels in the parameter convention: F(phi|m) = int_0^phi (1 - m sin^2)^(-1/2).
namespace ringqubit::special {

struct JacobiSCD {
  double sn;
  double cn;
  double dn;
};

struct CubicInvariants {
  double g2 = 0.0;
  double g3 = 0.0;
};

// Roots of 4y^3 - g2 y - g3. With all roots real they are e[0] >= e[1] >= e[2];
// otherwise e[1] is the real root and e[0], e[2] the conjugate pair (Im e[0] > 0).
struct CubicRoots {
  std::array<std::complex<double>, 3> e;
  bool all_real = true;
  double discriminant = 0.0;  // g2^3 - 27 g3^2

  double e1() const { return e[0].real(); }
  double e2() const { return e[1].real(); }
  double e3() const { return e[2].real(); }
};

double elliptic_k(double m);
double elliptic_f(double phi, double m);
double carlson_rf(double x, double y, double z);

JacobiSCD jacobi_scd(double u, double m);

CubicRoots cubic_roots(const CubicInvariants& inv);

double weierstrass_p(double u, const CubicInvariants& inv);
double weierstrass_p(double u, const CubicInvariants& inv, const CubicRoots& roots);
// Smallest positive real period of p.
double weierstrass_real_period(const CubicInvariants& inv);

}  // namespace ringqubit::special
