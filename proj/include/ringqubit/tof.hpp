#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ringqubit/model.hpp"

// Time-of-flight images of the two-ring ladder at U = 0.
namespace ringqubit::tof {

enum class MixingForm {
  Difference,  // tan 2theta = g / [t (cos kb - cos ka)], diagonalises the ladder
  Plus,  // the printed g / [t (cos ka + cos kb)], kept for comparison only
};

struct BogoliubovSpectrum {
  std::vector<double> k_values;  // 2 pi n / N
  std::vector<double> eps_alpha;
  std::vector<double> eps_beta;
  std::vector<double> theta_k;
  std::vector<double> cos2;  // cos 2theta_k, stored directly so g = 0 mixes exactly nothing
  std::vector<double> sin2;
  int n_sites = 0;
  double flux_a = 0.0;
  double flux_b = 0.0;
  double t = 1.0;
  double g = 0.0;
};

BogoliubovSpectrum bogoliubov_spectrum(const model::LadderParams& p,
                                       MixingForm form = MixingForm::Difference);

// Largest |off-diagonal| of the k-space ladder Hamiltonian after rotating with theta_k.
double rotation_residual(const BogoliubovSpectrum& s);

struct OccupationSet {
  std::vector<double> n_alpha;
  std::vector<double> n_beta;
  double mu = 0.0;
  double delta_mu = 0.0;  // (mu_alpha - mu_beta) / 2
  double mu_alpha = 0.0;
  double mu_beta = 0.0;
  double temperature = 0.0;  // k_B T in units of t
};

// Without an imbalance (or with imbalance 0) both branches share mu and delta = 0.
// A non-zero imbalance sum(n_alpha - n_beta) fixes mu_alpha and mu_beta separately.
OccupationSet solve_chemical_potentials(const BogoliubovSpectrum& s, double n_total,
                                        double temperature,
                                        std::optional<double> n_imbalance = std::nullopt);

struct Correlators {
  std::vector<double> aa;
  std::vector<double> bb;
  std::vector<double> ab;  // <a+ b> = <b+ a>
};

Correlators correlators(const BogoliubovSpectrum& s, const OccupationSet& occ);

enum class Plane { XY, YZ };  // kx-ky at kz = 0, ky-kz at kx = 0
enum class Component { Total, Direct, Cross };

struct ImageSpec {
  Plane plane = Plane::XY;
  double extent = 14.0;  // image spans [-extent, extent] in both axes
  int pixels = 256;
  double radius = 1.0;  // ring radius R
  double separation = 1.0;  // ring separation D along z
  std::optional<double> wannier_width;  // sigma; default 0.2 * lattice spacing 2R sin(pi/N)
  Component component = Component::Total;
};

struct MomentumImage {
  Plane plane = Plane::XY;
  double extent = 0.0;
  int pixels = 0;
  double wannier_width = 0.0;
  std::vector<double> values;  // row-major, row = second axis, column = first axis

  double at(int row, int col) const { return values[static_cast<size_t>(row) * pixels + col]; }
  double axis(int i) const { return -extent + 2.0 * extent * i / (pixels - 1); }
};

double default_wannier_width(int n_sites, double radius);

double density_at(double kx, double ky, double kz, const BogoliubovSpectrum& s,
                  const Correlators& c, double radius, double separation, double sigma,
                  Component component = Component::Total);

MomentumImage momentum_density(const BogoliubovSpectrum& s, const OccupationSet& occ,
                               const ImageSpec& spec);

// Local maxima above rel_threshold * max inside |k| < radius, using a square
// window of `window` pixels: the count of resolved interference fringes.
int fringe_maxima(const MomentumImage& img, int window = 5, double rel_threshold = 0.05,
                  double radius = -1.0);

// (max - min) / (max + min) of the envelope-free density along k_z at fixed (kx, ky).
double kz_modulation(double kx, double ky, const BogoliubovSpectrum& s, const Correlators& c,
                     double radius, double separation, int samples = 256);

std::string plane_name(Plane p);

}  // namespace ringqubit::tof
