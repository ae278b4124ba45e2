#include "ringqubit/action.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ringqubit/error.hpp"

namespace ringqubit::action {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Curve {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  std::function<double(double)> curvature;
};

// Safeguarded Newton on the slope inside a sign-changing bracket.
double refine_stationary(const Curve& c, double lo, double hi) {
  double flo = c.slope(lo);
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    const double f = c.slope(x);
    if (f == 0.0) return x;
    if ((f < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = f;
    } else {
      hi = x;
    }
    const double d = c.curvature(x);
    double next = d != 0.0 ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-12 || hi - lo < 1e-12) return next;
    x = next;
  }
  return x;
}

DoubleWellReport scan(const Curve& c, double center, int grid_points) {
  if (grid_points < 16) throw std::invalid_argument("grid too coarse for a well search");
  const double lo = center - kTwoPi;
  const double hi = center + kTwoPi;
  const double h = (hi - lo) / (grid_points - 1);
  std::vector<double> v(grid_points);
  for (int i = 0; i < grid_points; ++i) v[i] = c.value(lo + i * h);

  DoubleWellReport rep;
  for (int i = 1; i + 1 < grid_points; ++i) {
    if (v[i] < v[i - 1] && v[i] <= v[i + 1]) {
      const double x = refine_stationary(c, lo + (i - 1) * h, lo + (i + 1) * h);
      rep.minima.push_back({x, c.value(x)});
    }
  }
  if (rep.minima.empty()) throw NumericError("no minima found on the search interval");
  std::sort(rep.minima.begin(), rep.minima.end(),
            [](const Extremum& a, const Extremum& b) { return a.location < b.location; });

  if (rep.minima.size() == 2) {
    const double a = rep.minima[0].location;
    const double b = rep.minima[1].location;
    int ia = static_cast<int>(std::ceil((a - lo) / h));
    int ib = static_cast<int>(std::floor((b - lo) / h));
    int imax = ia;
    for (int i = ia; i <= ib; ++i) {
      if (v[i] > v[imax]) imax = i;
    }
    double top = lo + imax * h;
    if (imax > 0 && imax + 1 < grid_points) {
      const double l = std::max(a, top - h);
      const double r = std::min(b, top + h);
      if ((c.slope(l) > 0.0) != (c.slope(r) > 0.0)) top = refine_stationary(c, l, r);
    }
    rep.barrier = std::max(c.value(top), std::max(rep.minima[0].value, rep.minima[1].value));
    rep.is_two_level = true;
  } else {
    rep.barrier = std::max_element(rep.minima.begin(), rep.minima.end(), [](auto& x, auto& y) {
                    return x.value < y.value;
                  })->value;
  }
  return rep;
}

double cos_coupling(const TwoRingPotentialSpec& spec) { return spec.j_cos.value_or(spec.j); }

double inter_ring_offset(const TwoRingPotentialSpec& spec) {
  return (spec.n_sites - 2.0) / spec.n_sites * (spec.flux_a - spec.flux_b);
}

}  // namespace

void SingleRingPotentialSpec::validate() const {
  if (n_sites < 3) throw std::invalid_argument("ring needs at least 3 sites");
  if (!(j > 0.0)) throw std::invalid_argument("J must be positive");
}

void TwoRingPotentialSpec::validate() const {
  if (n_sites < 3) throw std::invalid_argument("ring needs at least 3 sites");
  if (!(j > 0.0)) throw std::invalid_argument("J must be positive");
}

double potential_single(double theta, const SingleRingPotentialSpec& spec) {
  const double x = theta - spec.flux;
  return spec.j / (spec.n_sites - 1) * x * x - spec.j_prime * std::cos(theta);
}

double potential_single_derivative(double theta, const SingleRingPotentialSpec& spec) {
  return 2.0 * spec.j / (spec.n_sites - 1) * (theta - spec.flux) + spec.j_prime * std::sin(theta);
}

double potential_two(double theta_a, double theta_b, const TwoRingPotentialSpec& spec) {
  const double c = spec.j / (2.0 * (spec.n_sites - 1));
  const double xa = theta_a - spec.flux_a;
  const double xb = theta_b - spec.flux_b;
  const double jc = cos_coupling(spec);
  return c * (xa * xa + xb * xb) - jc * (std::cos(theta_a) + std::cos(theta_b)) -
         spec.j_tilde * std::cos(theta_a - theta_b - inter_ring_offset(spec));
}

DoubleWellReport find_double_well(const SingleRingPotentialSpec& spec, int grid_points) {
  spec.validate();
  const double a = 2.0 * spec.j / (spec.n_sites - 1);
  Curve c{[&](double x) { return potential_single(x, spec); },
          [&](double x) { return potential_single_derivative(x, spec); },
          [&, a](double x) { return a + spec.j_prime * std::cos(x); }};
  return scan(c, spec.flux, grid_points);
}

DoubleWellReport find_double_well(const TwoRingPotentialSpec& spec, int grid_points) {
  spec.validate();
  const double a = spec.j / (spec.n_sites - 1);
  const double jc = cos_coupling(spec);
  const double off = inter_ring_offset(spec);
  // Along theta_a = x, theta_b = -x.
  Curve c{[&](double x) { return potential_two(x, -x, spec); },
          [&, a, jc, off](double x) {
            return a * (x - spec.flux_a) + a * (x + spec.flux_b) + 2.0 * jc * std::sin(x) +
                   2.0 * spec.j_tilde * std::sin(2.0 * x - off);
          },
          [&, a, jc, off](double x) {
            return 2.0 * a + 2.0 * jc * std::cos(x) + 4.0 * spec.j_tilde * std::cos(2.0 * x - off);
          }};
  return scan(c, 0.5 * (spec.flux_a - spec.flux_b), grid_points);
}

std::vector<Minimum2D> find_minima_2d(const TwoRingPotentialSpec& spec, int grid_points) {
  spec.validate();
  if (grid_points < 16) throw std::invalid_argument("grid too coarse for a well search");
  const int n = grid_points;
  const double ha = 2.0 * kTwoPi / (n - 1);
  const double a0 = spec.flux_a - kTwoPi;
  const double b0 = spec.flux_b - kTwoPi;
  std::vector<double> v(static_cast<size_t>(n) * n);
  auto at = [&](int i, int k) -> double& { return v[static_cast<size_t>(i) * n + k]; };
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) at(i, k) = potential_two(a0 + i * ha, b0 + k * ha, spec);
  }

  const double a = spec.j / (spec.n_sites - 1);
  const double jc = cos_coupling(spec);
  const double off = inter_ring_offset(spec);
  std::vector<Minimum2D> out;
  for (int i = 1; i + 1 < n; ++i) {
    for (int k = 1; k + 1 < n; ++k) {
      const double c = at(i, k);
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dk = -1; dk <= 1 && is_min; ++dk) {
          if (di == 0 && dk == 0) continue;
          const double nb = at(i + di, k + dk);
          // Plateau ties go to the first grid point in row-major order.
          const bool earlier = di < 0 || (di == 0 && dk < 0);
          if (nb < c || (nb == c && earlier)) is_min = false;
        }
      }
      if (!is_min) continue;
      // 2D Newton polish.
      double x = a0 + i * ha;
      double y = b0 + k * ha;
      for (int it = 0; it < 50; ++it) {
        const double s = std::sin(x - y - off);
        const double cc = std::cos(x - y - off);
        const double gx = a * (x - spec.flux_a) + jc * std::sin(x) + spec.j_tilde * s;
        const double gy = a * (y - spec.flux_b) + jc * std::sin(y) - spec.j_tilde * s;
        const double hxx = a + jc * std::cos(x) + spec.j_tilde * cc;
        const double hyy = a + jc * std::cos(y) + spec.j_tilde * cc;
        const double hxy = -spec.j_tilde * cc;
        const double det = hxx * hyy - hxy * hxy;
        if (det <= 0.0) break;
        const double dx = (hyy * gx - hxy * gy) / det;
        const double dy = (hxx * gy - hxy * gx) / det;
        if (std::abs(dx) > ha || std::abs(dy) > ha) break;
        x -= dx;
        y -= dy;
        if (std::hypot(dx, dy) < 1e-13) break;
      }
      out.push_back({x, y, potential_two(x, y, spec)});
    }
  }
  return out;
}

double matsubara_frequency(int l, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("inverse temperature must be positive");
  return kTwoPi * l / beta;
}

double kernel_admittance(double omega, const SingleRingPotentialSpec& spec, double u) {
  spec.validate();
  if (spec.n_sites % 2 != 0) throw std::invalid_argument("kernel requires an even number of sites");
  const double w2 = omega * omega;
  double y = 0.0;
  for (int k = 1; k <= (spec.n_sites - 2) / 2; ++k) {
    const double c = std::cos(kTwoPi * k / (spec.n_sites - 1));
    y += (1.0 + c) / (2.0 * spec.j * u * (1.0 - c) + w2);
  }
  return w2 * y;
}

KernelSample kernel_admittance(int l, double beta, const SingleRingPotentialSpec& spec, double u) {
  const double w = matsubara_frequency(l, beta);
  return {l, w, kernel_admittance(w, spec, u)};
}

double kernel_plateau(const SingleRingPotentialSpec& spec) {
  spec.validate();
  if (spec.n_sites % 2 != 0) throw std::invalid_argument("kernel requires an even number of sites");
  double y = 0.0;
  for (int k = 1; k <= (spec.n_sites - 2) / 2; ++k) y += 1.0 + std::cos(kTwoPi * k / (spec.n_sites - 1));
  return y;
}

KernelSeries kernel_series(const SingleRingPotentialSpec& spec, double u, double beta,
                           const std::vector<double>& tau, int l_max, double tol) {
  if (l_max < 1) throw std::invalid_argument("l_max must be at least 1");
  KernelSeries out;
  out.tau = tau;
  out.plateau = kernel_plateau(spec);
  out.l_max = l_max;
  out.g_regular.assign(tau.size(), {0.0, 0.0});
  for (int l = 0; l <= l_max; ++l) {
    const double w = matsubara_frequency(l, beta);
    const double r = kernel_admittance(w, spec, u) - out.plateau;
    for (size_t i = 0; i < tau.size(); ++i) out.g_regular[i] += r * std::polar(1.0, w * tau[i]);
  }
  // |Y - Y_inf| <= A / w_l^2, so the dropped tail is below A beta^2 / (4 pi^2 l_max).
  double a = 0.0;
  for (int k = 1; k <= (spec.n_sites - 2) / 2; ++k) {
    const double c = std::cos(kTwoPi * k / (spec.n_sites - 1));
    a += (1.0 + c) * 2.0 * spec.j * u * (1.0 - c);
  }
  out.tail_bound = a * beta * beta / (kTwoPi * kTwoPi * l_max);
  double scale = 0.0;
  for (const auto& g : out.g_regular) scale = std::max(scale, std::abs(g));
  if (out.tail_bound > tol * scale) {
    const double needed = std::ceil(a * beta * beta / (kTwoPi * kTwoPi * tol * scale));
    throw std::invalid_argument("l_max too small for tolerance; suggested l_max >= " +
                                std::to_string(static_cast<long long>(needed)));
  }
  return out;
}

}  // namespace ringqubit::action
