#include "ringqubit/dynamics.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <Eigen/Dense>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ringqubit/error.hpp"
#include "ringqubit/fft.hpp"

namespace ringqubit::dynamics {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGrazing = 1.0 - 1e-9;

double lam_rho_checked(const ReducedDynamicsParams& p) {
  p.validate();
  const double l = p.lam_rho();
  if (!(l > 0.0)) throw std::invalid_argument("lambda*rho must be positive for the analytic solutions");
  return l;
}

GPState rk4_step(const GPState& s, const ReducedDynamicsParams& p, double h) {
  auto rhs = [&](const GPState& x) {
    if (std::abs(x.z) >= kGrazing) {
      throw NumericError("grazing full imbalance; reduce step or perturb initial state");
    }
    return gp_rhs(x, p);
  };
  const Derivative k1 = rhs(s);
  const Derivative k2 = rhs({s.z + 0.5 * h * k1.dz, s.theta + 0.5 * h * k1.dtheta});
  const Derivative k3 = rhs({s.z + 0.5 * h * k2.dz, s.theta + 0.5 * h * k2.dtheta});
  const Derivative k4 = rhs({s.z + h * k3.dz, s.theta + h * k3.dtheta});
  return {s.z + h / 6.0 * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz),
          s.theta + h / 6.0 * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta)};
}

// Sign of dz/ds~ at the initial state; initial phases with sin = 0 are turning points.
bool initially_rising(const GPState& s) { return -std::sin(s.theta) > 0.0; }

}  // namespace

Derivative gp_rhs(const GPState& s, const ReducedDynamicsParams& p) {
  if (std::abs(s.z) >= 1.0 - 1e-12) throw NumericError("phase equation singular at full imbalance");
  const double r = std::sqrt(1.0 - s.z * s.z);
  return {-r * std::sin(s.theta), p.drive + p.lam_rho() * s.z + s.z / r * std::cos(s.theta)};
}

double conserved_energy(const GPState& s, const ReducedDynamicsParams& p) {
  if (std::abs(s.z) > 1.0) throw std::invalid_argument("|z| must not exceed 1");
  return 0.5 * p.lam_rho() * s.z * s.z + p.drive * s.z -
         std::sqrt(1.0 - s.z * s.z) * std::cos(s.theta);
}

Trajectory integrate(const GPState& initial, const ReducedDynamicsParams& p, double t_end,
                     double dt, int stride) {
  p.validate();
  if (!(t_end > 0.0) || !(dt > 0.0)) throw std::invalid_argument("t_end and dt must be positive");
  if (stride < 1) throw std::invalid_argument("stride must be at least 1");
  if (std::abs(initial.z) >= kGrazing) {
    throw NumericError("grazing full imbalance; reduce step or perturb initial state");
  }
  const double h0 = conserved_energy(initial, p);
  const double tol = 1e-10 * std::max(1.0, std::abs(h0));

  for (int attempt = 0; attempt < 24; ++attempt) {
    const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    const double h = t_end / steps;
    Trajectory tr;
    tr.dt = h;
    GPState s = initial;
    auto record = [&](long i, const GPState& x, double e) {
      tr.times.push_back(i * h);
      tr.states.push_back(x);
      tr.energy.push_back(e);
    };
    record(0, s, h0);
    double drift = 0.0;
    for (long i = 1; i <= steps; ++i) {
      s = rk4_step(s, p, h);
      const double e = conserved_energy(s, p);
      drift = std::max(drift, std::abs(e - h0));
      if (drift >= tol) break;
      if (i % stride == 0 || i == steps) record(i, s, e);
    }
    if (drift < tol) {
      tr.energy_drift = drift;
      return tr;
    }
    dt = h / 2.0;
  }
  throw NumericError("energy drift stays above tolerance after repeated step halving");
}

TwoModeTrajectory integrate_two_mode(const model::LadderParams& p, double n_total,
                                     const GPState& initial, double t_end_tilde, double dt_tilde,
                                     int stride) {
  p.validate();
  if (!(p.g > 0.0)) throw std::invalid_argument("two-mode integration needs g > 0");
  if (!(n_total > 0.0) || !(t_end_tilde > 0.0) || !(dt_tilde > 0.0) || stride < 1) {
    throw std::invalid_argument("invalid two-mode integration settings");
  }
  using C = std::complex<double>;
  const double n = p.n_sites;
  const double eps_a = -2.0 * p.t * std::cos(p.flux_a / n) - p.mu_a;
  const double eps_b = -2.0 * p.t * std::cos(p.flux_b / n) - p.mu_b;
  const double un = p.u / n;
  const double g = p.g;
  const C i(0.0, 1.0);
  auto rhs = [&](const std::array<C, 2>& y) {
    const double na = std::norm(y[0]);
    const double nb = std::norm(y[1]);
    return std::array<C, 2>{-i * ((eps_a + un * na) * y[0] - g * y[1]),
                            -i * ((eps_b + un * nb) * y[1] - g * y[0])};
  };

  std::array<C, 2> y{std::polar(std::sqrt(0.5 * n_total * (1.0 - initial.z)), 0.5 * initial.theta),
                     std::polar(std::sqrt(0.5 * n_total * (1.0 + initial.z)), -0.5 * initial.theta)};
  const long steps = static_cast<long>(std::ceil(t_end_tilde / dt_tilde - 1e-9));
  const double h_tilde = t_end_tilde / steps;
  const double h = h_tilde / (2.0 * g);
  TwoModeTrajectory out;
  out.samples.push_back({0.0, y[0], y[1]});
  for (long k = 1; k <= steps; ++k) {
    auto axpy = [](const std::array<C, 2>& a, const std::array<C, 2>& b, double s) {
      return std::array<C, 2>{a[0] + s * b[0], a[1] + s * b[1]};
    };
    const auto k1 = rhs(y);
    const auto k2 = rhs(axpy(y, k1, 0.5 * h));
    const auto k3 = rhs(axpy(y, k2, 0.5 * h));
    const auto k4 = rhs(axpy(y, k3, h));
    for (int c = 0; c < 2; ++c) y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    const double total = std::norm(y[0]) + std::norm(y[1]);
    out.max_number_drift = std::max(out.max_number_drift, std::abs(total - n_total) / n_total);
    if (k % stride == 0 || k == steps) out.samples.push_back({k * h_tilde, y[0], y[1]});
  }
  return out;
}

GPState reduce(const TwoModeSample& s) {
  const double na = std::norm(s.phi_a);
  const double nb = std::norm(s.phi_b);
  return {(nb - na) / (na + nb), std::arg(s.phi_a * std::conj(s.phi_b))};
}

Delta0Modulus modulus_delta0(const ReducedDynamicsParams& p, const GPState& initial) {
  const double l = lam_rho_checked(p);
  if (p.drive != 0.0) throw std::invalid_argument("the elliptic-modulus solution requires zero drive");
  Delta0Modulus out;
  out.h0 = conserved_energy(initial, p);
  const double h0 = out.h0;
  const double s = std::max(0.0, l * l + 1.0 - 2.0 * l * h0);
  const double sq = std::sqrt(s);
  const double x = l * h0 - 1.0;
  // Larger root of (l^2/4) y^2 - x y - (1 - h0^2), written without cancellation.
  double c2 = x < 0.0 ? 2.0 * (1.0 - h0 * h0) / (sq - x) : 2.0 * (x + sq) / (l * l);
  if (c2 < -1e-14) {
    throw std::invalid_argument(
        "negative oscillation amplitude C^2: initial energy incompatible with lambda*rho");
  }
  c2 = std::max(c2, 0.0);
  out.c_squared = c2;
  out.zeta_squared = 2.0 * sq;
  if (c2 <= 1e-28 || sq <= 1e-14) {
    out.branch = Delta0Branch::Constant;
    out.m = sq > 0.0 ? l * l * c2 / (4.0 * sq) : std::numeric_limits<double>::infinity();
    return out;
  }
  out.m = l * l * c2 / (4.0 * sq);
  if (std::abs(out.m - 1.0) < 1e-12) {
    out.branch = Delta0Branch::Sech;
  } else if (out.m < 1.0) {
    out.branch = Delta0Branch::Cn;
  } else {
    out.branch = Delta0Branch::Dn;
  }
  return out;
}

double analytic_delta0(double s_tilde, const ReducedDynamicsParams& p, const GPState& initial) {
  const Delta0Modulus d = modulus_delta0(p, initial);
  const double l = p.lam_rho();
  const double z0 = initial.z;
  const double c = std::sqrt(d.c_squared);
  const double sgn_sin = std::sin(initial.theta) > 0.0 ? 1.0 : -1.0;
  switch (d.branch) {
    case Delta0Branch::Constant:
      return z0;
    case Delta0Branch::Cn: {
      const double omega = std::pow(l * l + 1.0 - 2.0 * l * d.h0, 0.25);
      const double phi = std::acos(std::clamp(z0 / c, -1.0, 1.0));
      const double u0 = sgn_sin * special::elliptic_f(phi, d.m);
      return c * special::jacobi_scd(omega * s_tilde + u0, d.m).cn;
    }
    case Delta0Branch::Dn: {
      const double cs = std::copysign(c, z0);
      const double mp = 1.0 / d.m;
      const double ratio = std::clamp(z0 / cs, 0.0, 1.0);
      const double sin2 = std::clamp((1.0 - ratio * ratio) / mp, 0.0, 1.0);
      const double u_star = special::elliptic_f(std::asin(std::sqrt(sin2)), mp);
      const double u0 = (cs > 0.0) == (sgn_sin > 0.0) ? u_star : -u_star;
      return cs * special::jacobi_scd(0.5 * l * c * s_tilde + u0, mp).dn;
    }
    case Delta0Branch::Sech: {
      if (std::abs(z0) < 1e-300) return 0.0;
      const double cs = std::copysign(c, z0);
      const double ratio = std::clamp(z0 / cs, 1e-300, 1.0);
      const double u_star = std::acosh(1.0 / ratio);
      const double u0 = (cs > 0.0) == (sgn_sin > 0.0) ? u_star : -u_star;
      return cs / std::cosh(0.5 * l * c * s_tilde + u0);
    }
  }
  return z0;
}

double QuarticData::f(double z) const {
  return (((-z + 4.0 * a[0]) * z + 6.0 * a[1]) * z + 4.0 * a[2]) * z + a[3];
}

double QuarticData::df(double z) const {
  return ((-4.0 * z + 12.0 * a[0]) * z + 12.0 * a[1]) * z + 4.0 * a[2];
}

double QuarticData::d2f(double z) const { return (-12.0 * z + 24.0 * a[0]) * z + 12.0 * a[1]; }

QuarticData quartic_data(const ReducedDynamicsParams& p, const GPState& initial) {
  const double l = lam_rho_checked(p);
  const double d = p.drive;
  QuarticData q;
  q.h0 = conserved_energy(initial, p);
  const double h0 = q.h0;
  q.a = {-d / l, 2.0 / (3.0 * l * l) * (l * h0 - (d * d + 1.0)), 2.0 * h0 * d / (l * l),
         4.0 * (1.0 - h0 * h0) / (l * l)};
  const auto& a = q.a;
  q.invariants.g2 = -a[3] - 4.0 * a[0] * a[2] + 3.0 * a[1] * a[1];
  q.invariants.g3 =
      -a[1] * a[3] + 2.0 * a[0] * a[1] * a[2] - a[1] * a[1] * a[1] + a[2] * a[2] - a[0] * a[0] * a[3];
  q.cubic = special::cubic_roots(q.invariants);

  const double scale = std::max({1.0, std::abs(a[3]), 4.0 / (l * l)});
  const double z0 = initial.z;
  if (q.f(z0) < -1e-12 * scale) throw std::invalid_argument("inconsistent initial data");

  // Real roots from the companion matrix of the monic quartic, Newton polished.
  Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
  comp(0, 3) = a[3];
  comp(1, 3) = 4.0 * a[2];
  comp(2, 3) = 6.0 * a[1];
  comp(3, 3) = 4.0 * a[0];
  comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
  const Eigen::EigenSolver<Eigen::Matrix4d> es(comp, false);
  for (int i = 0; i < 4; ++i) {
    const std::complex<double> r = es.eigenvalues()(i);
    if (std::abs(r.imag()) > 1e-6 * std::max(1.0, std::abs(r))) continue;
    double x = r.real();
    for (int it = 0; it < 8; ++it) {
      const double dfx = q.df(x);
      if (dfx == 0.0) break;
      const double step = q.f(x) / dfx;
      if (!std::isfinite(step) || std::abs(step) > 1e-3 * std::max(1.0, std::abs(x))) break;
      x -= step;
    }
    q.real_roots.push_back(x);
  }
  std::sort(q.real_roots.begin(), q.real_roots.end());

  if (std::abs(std::sin(initial.theta)) < 1e-14) {
    q.z1 = z0;
    q.s0 = 0.0;
    return q;
  }
  const bool rising = initially_rising(initial);
  double z1 = std::numeric_limits<double>::quiet_NaN();
  for (double r : q.real_roots) {
    if (rising && r < z0) z1 = r;
    if (!rising && r > z0 && std::isnan(z1)) z1 = r;
  }
  if (std::isnan(z1)) throw NumericError("no turning point of the quartic brackets the initial state");
  q.z1 = z1;

  // f / (z - z1) by synthetic division, coefficients from z^3 down.
  std::array<double, 5> c{-1.0, 4.0 * a[0], 6.0 * a[1], 4.0 * a[2], a[3]};
  std::array<double, 4> def{};
  def[0] = c[0];
  for (int k = 1; k < 4; ++k) def[k] = c[k] + z1 * def[k - 1];
  auto deflated = [&](double z) { return ((def[0] * z + def[1]) * z + def[2]) * z + def[3]; };
  // z = z1 + (z0 - z1) v^2 removes the square-root endpoint singularity at z1.
  const double span = z0 - z1;
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double integral = integrator.integrate(
      [&](double v) { return 1.0 / std::sqrt(std::abs(deflated(z1 + span * v * v))); }, 0.0, 1.0);
  q.s0 = -(2.0 / l) * 2.0 * std::sqrt(std::abs(span)) * integral;
  return q;
}

double analytic_weierstrass(double s_tilde, const ReducedDynamicsParams& p, const GPState& initial) {
  return analytic_weierstrass(s_tilde, p, quartic_data(p, initial));
}

namespace {

double from_wp(double wp, const QuarticData& q) {
  const double den = wp - q.d2f(q.z1) / 24.0;
  if (std::abs(den) < 1e-12) throw NumericError("pole crossing in the Weierstrass solution");
  return q.z1 + 0.25 * q.df(q.z1) / den;
}

}  // namespace

double analytic_weierstrass(double s_tilde, const ReducedDynamicsParams& p, const QuarticData& q) {
  const double u = 0.5 * p.lam_rho() * (s_tilde - q.s0);
  if (u == 0.0) return q.z1;
  return from_wp(special::weierstrass_p(u, q.invariants, q.cubic), q);
}

double analytic_jacobi_sn_form(double s_tilde, const ReducedDynamicsParams& p,
                               const QuarticData& q) {
  if (!q.cubic.all_real || q.cubic.discriminant <= 0.0) {
    throw std::invalid_argument("sn form requires a positive discriminant");
  }
  const double e1 = q.cubic.e1();
  const double e2 = q.cubic.e2();
  const double e3 = q.cubic.e3();
  const double arg = 0.5 * p.lam_rho() * std::sqrt(e1 - e3) * (s_tilde - q.s0);
  if (arg == 0.0) return q.z1;
  const double sn = special::jacobi_scd(arg, (e2 - e3) / (e1 - e3)).sn;
  return from_wp(e3 + (e1 - e3) / (sn * sn), q);
}

double analytic_jacobi_cn_form(double s_tilde, const ReducedDynamicsParams& p,
                               const QuarticData& q) {
  if (q.cubic.all_real) throw std::invalid_argument("cn form requires a negative discriminant");
  const double e2 = q.cubic.e2();
  const double h2 = std::sqrt(3.0 * e2 * e2 - q.invariants.g2 / 4.0);
  const double k2 = 0.5 - 3.0 * e2 / (4.0 * h2);
  const double arg = p.lam_rho() * std::sqrt(h2) * (s_tilde - q.s0);
  if (arg == 0.0) return q.z1;
  const double cn = special::jacobi_scd(arg, k2).cn;
  return from_wp(e2 + h2 * (1.0 + cn) / (1.0 - cn), q);
}

RegimeReport classify_regime(const ReducedDynamicsParams& p, const GPState& initial) {
  const double l = lam_rho_checked(p);
  const double two_g = 2.0 * p.g;
  RegimeReport r;
  r.drive_zero = p.drive == 0.0;
  const QuarticData q = quartic_data(p, initial);
  r.g2 = q.invariants.g2;
  r.g3 = q.invariants.g3;
  r.discriminant = q.cubic.discriminant;
  r.quartic_roots = q.real_roots;

  if (r.drive_zero) {
    const Delta0Modulus d = modulus_delta0(p, initial);
    r.modulus = d.m;
    const double c = std::sqrt(d.c_squared);
    switch (d.branch) {
      case Delta0Branch::Constant:
        r.label = "constant";
        r.z_bar = initial.z;
        break;
      case Delta0Branch::Cn: {
        r.label = "rabi-like";
        const double omega = std::pow(l * l + 1.0 - 2.0 * l * d.h0, 0.25);
        r.omega = two_g * 2.0 * kPi * omega / (4.0 * special::elliptic_k(d.m));
        r.z_bar = 0.0;
        break;
      }
      case Delta0Branch::Sech:
        r.label = "critical";
        r.z_bar = 0.0;
        break;
      case Delta0Branch::Dn: {
        r.label = "mqst";
        const double kk = special::elliptic_k(1.0 / d.m);
        r.omega = two_g * 2.0 * kPi * (0.5 * l * c) / (2.0 * kk);
        r.z_bar = std::copysign(c, initial.z) * kPi / (2.0 * kk);
        break;
      }
    }
    return r;
  }

  const double fscale = std::max({1.0, std::abs(q.a[3]), 4.0 / (l * l)});
  const double dfz1 = q.df(q.z1);
  const double b = q.d2f(q.z1) / 24.0;
  if (std::abs(dfz1) < 1e-10 * fscale && std::abs(std::sin(initial.theta)) < 1e-14) {
    r.label = "constant";
    r.z_bar = q.z1;
    return r;
  }
  const double dscale = std::abs(r.g2 * r.g2 * r.g2) + 27.0 * r.g3 * r.g3;
  if (std::abs(r.discriminant) <= 1e-10 * dscale) {
    const double c = std::sqrt(std::max(0.0, r.g2 / 12.0));
    if (r.g3 < 0.0) {
      r.label = "exponential-decay";
      r.z_bar = q.z1 + 0.25 * dfz1 / (c - b);
    } else {
      r.label = "mqst";
      r.omega = two_g * std::sqrt(3.0 * c) * l;
      r.z_bar = q.z1 + 0.25 * dfz1 / (2.0 * (2.0 * c - b));
    }
    return r;
  }
  r.label = "mqst";
  const double period_u = special::weierstrass_real_period(q.invariants);
  r.omega = two_g * kPi * l / period_u;
  const double e_top = q.cubic.all_real ? q.cubic.e1() : q.cubic.e2();
  r.z_bar = q.z1 + 0.25 * dfz1 / (2.0 * (e_top - b));
  return r;
}

double omega0_small_coupling(const ReducedDynamicsParams& p, double z0) {
  return 2.0 * p.g * (1.0 + 0.5 * p.lam_rho() * std::sqrt(1.0 - z0 * z0));
}

double omega_drive_small_coupling(const ReducedDynamicsParams& p, double z0) {
  const double d = p.drive;
  const double w = 1.0 + d * d;
  return 2.0 * p.g *
         (std::sqrt(w) + p.lam_rho() * (z0 * d - std::sqrt(1.0 - z0 * z0)) * (2.0 * d * d - 1.0) /
                             (2.0 * std::pow(w, 1.5)));
}

double dominant_frequency(std::span<const double> samples, double dt) {
  const size_t n = samples.size();
  if (n < 8) throw std::invalid_argument("too few samples for a spectral peak");
  if (!(dt > 0.0)) throw std::invalid_argument("sample spacing must be positive");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  size_t padded = 1;
  while (padded < 8 * n) padded <<= 1;
  std::vector<double> buf(padded, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (n - 1));
    buf[i] = (samples[i] - mean) * w;
  }
  const auto spec = fft::rfft(buf);
  size_t best = 1;
  for (size_t k = 1; k < spec.size(); ++k) {
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  }
  double offset = 0.0;
  if (best > 0 && best + 1 < spec.size()) {
    // Parabola through the log magnitudes (exact for a Gaussian-shaped peak).
    const double a = std::log(std::abs(spec[best - 1]) + 1e-300);
    const double b = std::log(std::abs(spec[best]) + 1e-300);
    const double c = std::log(std::abs(spec[best + 1]) + 1e-300);
    const double den = a - 2.0 * b + c;
    if (den < 0.0) offset = 0.5 * (a - c) / den;
  }
  return 2.0 * kPi * (best + offset) / (padded * dt);
}

}  // namespace ringqubit::dynamics
