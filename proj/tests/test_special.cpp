#include "doctest.h"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "ringqubit/special.hpp"

using namespace ringqubit::special;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

// F(phi|m) by adaptive Gauss-Kronrod, kept apart from the library's Carlson route.
double quad_f(double phi, double m) {
  auto f = [m](double t) { return 1.0 / std::sqrt(1.0 - m * std::sin(t) * std::sin(t)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, phi, 15, 1e-15);
}

// amplitude phi with F(phi|m) = u, for 0 < u < K
double quad_amplitude(double u, double m) {
  auto g = [&](double phi) { return quad_f(phi, m) - u; };
  boost::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(g, 0.0, kPi / 2, boost::math::tools::eps_tolerance<double>(52), it);
  return 0.5 * (r.first + r.second);
}

double cubic_residual(std::complex<double> e, const CubicInvariants& inv) {
  return std::abs(4.0 * e * e * e - inv.g2 * e - inv.g3);
}

// u = int_p^inf ds / sqrt(4 s^3 - g2 s - g3)
double wp_inverse(double p, const CubicInvariants& inv) {
  auto h = [&](double t) {
    const double s = p + t;
    return 1.0 / std::sqrt(4.0 * s * s * s - inv.g2 * s - inv.g3);
  };
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate(h, 1e-13);
}
}  // namespace

TEST_CASE("complete elliptic integral") {
  CHECK(elliptic_k(0.0) == Approx(kPi / 2).epsilon(1e-15));
  // frozen from the quadrature oracle
  CHECK(elliptic_k(0.5) == Approx(1.8540746773013714).epsilon(1e-14));
  for (double m : {0.1, 0.5, 0.9, 0.99}) {
    CHECK(elliptic_k(m) == Approx(quad_f(kPi / 2, m)).epsilon(1e-13));
  }
  const double m = 1.0 - 1e-10;
  CHECK(elliptic_k(m) > 12.0);
  CHECK(elliptic_k(m) == Approx(0.5 * std::log(16.0 / (1.0 - m))).epsilon(1e-9));
  CHECK_THROWS_WITH(elliptic_k(1.0), "modulus out of range");
  CHECK_THROWS_WITH(elliptic_k(-0.1), "modulus out of range");
}

TEST_CASE("incomplete integral") {
  for (double m : {0.0, 0.3, 0.8, 0.999}) {
    for (double phi : {0.1, 0.7, 1.5, 2.9, -1.1, 7.3}) {
      CHECK(elliptic_f(phi, m) == Approx(quad_f(phi, m)).epsilon(1e-12));
    }
  }
  CHECK(carlson_rf(1.0, 1.0, 1.0) == Approx(1.0).epsilon(1e-15));
  // R_F(0,1,2) = K(1/2)/sqrt(2)... in parameter form R_F(0, 1-m, 1) = K(m)
  CHECK(carlson_rf(0.0, 0.5, 1.0) == Approx(elliptic_k(0.5)).epsilon(1e-14));
}

TEST_CASE("Jacobi functions at the limits and against inversion") {
  for (double u : {-2.0, 0.3, 1.7, 5.0}) {
    auto s0 = jacobi_scd(u, 0.0);
    CHECK(s0.sn == Approx(std::sin(u)).epsilon(1e-15));
    CHECK(s0.cn == Approx(std::cos(u)).epsilon(1e-15));
    CHECK(s0.dn == 1.0);
    auto s1 = jacobi_scd(u, 1.0);
    CHECK(s1.sn == Approx(std::tanh(u)).epsilon(1e-15));
    CHECK(s1.cn == Approx(1.0 / std::cosh(u)).epsilon(1e-15));
    CHECK(s1.dn == Approx(1.0 / std::cosh(u)).epsilon(1e-15));
  }
  const double m = 0.3;
  const double u = 1.2345;
  const double phi = quad_amplitude(u, m);
  auto s = jacobi_scd(u, m);
  CHECK(s.sn == Approx(std::sin(phi)).epsilon(1e-12));
  CHECK(s.cn == Approx(std::cos(phi)).epsilon(1e-12));
  CHECK(s.dn == Approx(std::sqrt(1.0 - m * std::sin(phi) * std::sin(phi))).epsilon(1e-12));
  // frozen oracle value
  CHECK(s.sn == Approx(0.91888079104302434).epsilon(1e-12));
  CHECK(s.cn == Approx(0.39453528594049209).epsilon(1e-12));
}

TEST_CASE("Jacobi identities and periods on random draws") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uu(-30.0, 30.0);
  std::uniform_real_distribution<double> um(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = uu(rng);
    const double m = um(rng);
    auto s = jacobi_scd(u, m);
    worst = std::max(worst, std::abs(s.sn * s.sn + s.cn * s.cn - 1.0));
    worst = std::max(worst, std::abs(m * s.sn * s.sn + s.dn * s.dn - 1.0));
  }
  CHECK(worst < 1e-12);
  for (int i = 0; i < 500; ++i) {
    const double u = uu(rng) / 10.0;
    const double m = 0.98 * um(rng);
    const double k = elliptic_k(m);
    auto a = jacobi_scd(u, m);
    CHECK(jacobi_scd(u + 4 * k, m).sn == Approx(a.sn).epsilon(1e-10).scale(1.0));
    CHECK(jacobi_scd(u + 4 * k, m).cn == Approx(a.cn).epsilon(1e-10).scale(1.0));
    CHECK(jacobi_scd(u + 2 * k, m).dn == Approx(a.dn).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("cubic roots") {
  auto r = cubic_roots({4.0, 0.0});
  REQUIRE(r.all_real);
  CHECK(r.e1() == Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(r.e2()) < 1e-15);
  CHECK(r.e3() == Approx(-1.0).epsilon(1e-15));
  CHECK(r.discriminant == 64.0);

  r = cubic_roots({0.0, 0.0});
  for (auto e : r.e) CHECK(std::abs(e) == 0.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 2000; ++i) {
    CubicInvariants inv{u(rng), u(rng)};
    if (i % 3 == 0) inv.g2 = std::abs(inv.g2) * 10.0;
    auto c = cubic_roots(inv);
    const double scale = std::max({1.0, std::abs(inv.g2), std::abs(inv.g3)});
    for (auto e : c.e) CHECK(cubic_residual(e, inv) < 1e-12 * scale);
    CHECK(c.all_real == (c.discriminant >= 0.0));
    if (c.all_real) {
      CHECK(c.e1() >= c.e2());
      CHECK(c.e2() >= c.e3());
    } else {
      CHECK(c.e[0].imag() > 0.0);
      CHECK(c.e[1].imag() == 0.0);
      CHECK(c.e[2] == std::conj(c.e[0]));
    }
  }
}

TEST_CASE("invariants from roots round trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng);
    double b = u(rng);
    double c = -a - b;
    const double g2 = -4.0 * (a * b + a * c + b * c);
    const double g3 = 4.0 * a * b * c;
    auto r = cubic_roots({g2, g3});
    REQUIRE(r.all_real);
    const double e1 = r.e1(), e2 = r.e2(), e3 = -e1 - e2;
    const double scale = std::max({1.0, std::abs(g2), std::abs(g3)});
    CHECK(std::abs(-4.0 * (e1 * e2 + e1 * e3 + e2 * e3) - g2) < 1e-12 * scale);
    CHECK(std::abs(4.0 * e1 * e2 * e3 - g3) < 1e-12 * scale);
  }
}

TEST_CASE("Weierstrass p basics") {
  CHECK_THROWS_WITH(weierstrass_p(0.0, {4.0, 0.0}), "pole of \xe2\x84\x98");
  for (double u : {1e-3, 1e-2}) {
    CHECK(weierstrass_p(u, {4.0, 0.0}) * u * u == Approx(1.0).epsilon(1e-4));
  }
  CHECK(weierstrass_p(0.5, {0.0, 0.0}) == Approx(4.0).epsilon(1e-15));
}

TEST_CASE("degenerate invariants match the sinh closed form") {
  for (double c : {0.2, 1.0, 3.5}) {
    const CubicInvariants inv{12.0 * c * c, -8.0 * c * c * c};
    for (double u : {0.1, 0.4, 1.3, 2.0}) {
      const double s = std::sinh(std::sqrt(3.0 * c) * u);
      CHECK(weierstrass_p(u, inv) == Approx(c + 3.0 * c / (s * s)).epsilon(1e-9));
    }
  }
  // other degenerate sign: trigonometric closed form
  for (double c : {0.5, 2.0}) {
    const CubicInvariants inv{12.0 * c * c, 8.0 * c * c * c};
    for (double u : {0.1, 0.4, 0.8}) {
      const double s = std::sin(std::sqrt(3.0 * c) * u);
      CHECK(weierstrass_p(u, inv) == Approx(-c + 3.0 * c / (s * s)).epsilon(1e-9));
    }
  }
}

TEST_CASE("Weierstrass p inverts its defining integral") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    CubicInvariants inv{u(rng), u(rng)};
    if (i % 2 == 0) inv.g2 = 3.0 * std::abs(inv.g2) + 1.0;
    const double omega = weierstrass_real_period(inv);
    const double x = frac(rng) * omega / 2.0;
    const double p = weierstrass_p(x, inv);
    worst = std::max(worst, std::abs(wp_inverse(p, inv) - x) / std::max(1.0, x));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("Weierstrass p satisfies its differential equation") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> frac(0.1, 0.4);
  for (int i = 0; i < 200; ++i) {
    CubicInvariants inv{u(rng), u(rng)};
    const double x = frac(rng) * weierstrass_real_period(inv);
    const double h = 1e-5;
    const double p = weierstrass_p(x, inv);
    const double dp = (weierstrass_p(x + h, inv) - weierstrass_p(x - h, inv)) / (2 * h);
    const double rhs = 4 * p * p * p - inv.g2 * p - inv.g3;
    CHECK(dp * dp == Approx(rhs).epsilon(1e-8).scale(std::max(1.0, std::abs(rhs))));
  }
}

TEST_CASE("Weierstrass real period") {
  const CubicInvariants inv{4.0, 0.0};
  const double w = weierstrass_real_period(inv);
  for (double x : {0.2, 0.9, 1.4}) {
    CHECK(weierstrass_p(x + w, inv) == Approx(weierstrass_p(x, inv)).epsilon(1e-11));
  }
  // half period is the turning point e1
  CHECK(weierstrass_p(w / 2, inv) == Approx(1.0).epsilon(1e-12));
  const CubicInvariants cx{-2.0, 3.0};
  const double wc = weierstrass_real_period(cx);
  CHECK(weierstrass_p(wc / 2, cx) == Approx(cubic_roots(cx).e2()).epsilon(1e-11));
}
