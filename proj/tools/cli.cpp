#include "cli.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <boost/version.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "ringqubit/action.hpp"
#include "ringqubit/dynamics.hpp"
#include "ringqubit/error.hpp"
#include "ringqubit/fft.hpp"
#include "ringqubit/gates.hpp"
#include "ringqubit/kinoform.hpp"
#include "ringqubit/model.hpp"
#include "ringqubit/spectrum.hpp"
#include "ringqubit/tof.hpp"
#include "schema.hpp"

#ifndef RINGQUBIT_VERSION
#define RINGQUBIT_VERSION "dev"
#endif

namespace ringqubit::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Collects files under one directory and remembers what was written.
class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory '" + dir_.string() + "'");
  }

  void text(const std::string& name, const std::string& content, const std::string& kind) {
    const fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::binary);
    f << content;
    f.close();
    if (!f) throw IoError("cannot write '" + p.string() + "'");
    files_.push_back({{"path", name}, {"kind", kind}, {"bytes", content.size()}});
  }

  void write_json(const std::string& name, const json& j) { text(name, j.dump(2) + "\n", "json"); }

  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& columns) {
    std::string s;
    for (size_t c = 0; c < header.size(); ++c) s += (c ? "," : "") + header[c];
    s += "\n";
    const size_t rows = columns.empty() ? 0 : columns[0].size();
    for (size_t r = 0; r < rows; ++r) {
      for (size_t c = 0; c < columns.size(); ++c) {
        if (c) s += ",";
        s += num(columns[c][r]);
      }
      s += "\n";
    }
    text(name, s, "csv");
  }

  // Row-major, first row first. Pixel = round(maxval * v / vmax), clamped at 0.
  void pgm(const std::string& name, int w, int h, const std::vector<double>& v, int bits, double vmax) {
    const int maxval = bits == 8 ? 255 : 65535;
    std::string s = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n" + std::to_string(maxval) + "\n";
    for (double x : v) {
      long q = vmax > 0.0 ? std::lround(maxval * x / vmax) : 0;
      q = std::clamp<long>(q, 0, maxval);
      if (bits == 16) s.push_back(static_cast<char>((q >> 8) & 0xff));
      s.push_back(static_cast<char>(q & 0xff));
    }
    text(name, s, "pgm");
  }

  json manifest_files() const {
    json f = files_;
    std::sort(f.begin(), f.end(), [](const json& a, const json& b) { return a["path"] < b["path"]; });
    return f;
  }

 private:
  fs::path dir_;
  json files_ = json::array();
};

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

json run_potential(const json& p, Artifacts& out) {
  json res;
  const int n = p["n_sites"];
  if (p["ring"] == "single") {
    action::SingleRingPotentialSpec s;
    s.j = p["j"];
    s.j_prime = p["j_prime"];
    s.n_sites = n;
    s.flux = p["flux"];
    const int m = p["samples"];
    std::vector<double> th(m), v(m);
    for (int i = 0; i < m; ++i) {
      th[i] = s.flux - 2 * kPi + 4 * kPi * i / (m - 1);
      v[i] = action::potential_single(th[i], s);
    }
    out.csv("potential.csv", {"theta", "V"}, {th, v});
    const auto rep = action::find_double_well(s);
    json minima = json::array();
    for (const auto& e : rep.minima) minima.push_back({{"theta", e.location}, {"V", e.value}});
    res = {{"ring", "single"},
           {"delta", s.j_prime * (n - 1) / (2.0 * s.j)},
           {"minima", minima},
           {"barrier", rep.barrier},
           {"is_two_level", rep.is_two_level}};
    if (p.contains("kernel")) {
      const json& k = p["kernel"];
      const double u = k["u"], beta = k["beta"];
      const int nt = k["tau_samples"], lt = k["l_table"];
      std::vector<double> tau(nt);
      for (int i = 0; i < nt; ++i) tau[i] = beta * i / nt;
      const auto ks = action::kernel_series(s, u, beta, tau, k["l_max"], k["tol"]);
      std::vector<double> re, im;
      for (const auto& g : ks.g_regular) {
        re.push_back(g.real());
        im.push_back(g.imag());
      }
      out.csv("kernel_tau.csv", {"tau", "re_g_regular", "im_g_regular"}, {tau, re, im});
      std::vector<double> ls, ws, ys;
      for (int l = 0; l <= lt; ++l) {
        const auto smp = action::kernel_admittance(l, beta, s, u);
        ls.push_back(l);
        ws.push_back(smp.omega_l);
        ys.push_back(smp.y_value);
      }
      out.csv("kernel_matsubara.csv", {"l", "omega_l", "Y"}, {ls, ws, ys});
      res["kernel"] = {{"plateau", ks.plateau}, {"l_max", ks.l_max}, {"tail_bound", ks.tail_bound}};
    }
    return res;
  }
  action::TwoRingPotentialSpec s;
  s.j = p["j"];
  s.j_tilde = p["j_tilde"];
  s.n_sites = n;
  s.flux_a = p["flux_a"];
  s.flux_b = p["flux_b"];
  if (p.contains("j_cos")) s.j_cos = p["j_cos"].get<double>();
  const int m = p["samples"];
  const double c = 0.5 * (s.flux_a - s.flux_b);
  std::vector<double> th(m), v(m);
  for (int i = 0; i < m; ++i) {
    th[i] = c - 2 * kPi + 4 * kPi * i / (m - 1);
    v[i] = action::potential_two(th[i], -th[i], s);
  }
  out.csv("potential_cut.csv", {"theta_a", "V"}, {th, v});
  const int g = p["grid_2d"];
  std::vector<double> ta, tb, vv;
  for (int i = 0; i < g; ++i) {
    for (int k = 0; k < g; ++k) {
      ta.push_back(s.flux_a - 2 * kPi + 4 * kPi * i / (g - 1));
      tb.push_back(s.flux_b - 2 * kPi + 4 * kPi * k / (g - 1));
      vv.push_back(action::potential_two(ta.back(), tb.back(), s));
    }
  }
  out.csv("potential_2d.csv", {"theta_a", "theta_b", "V"}, {ta, tb, vv});
  const auto rep = action::find_double_well(s);
  json minima = json::array();
  for (const auto& e : rep.minima) minima.push_back({{"theta_a", e.location}, {"V", e.value}});
  json m2 = json::array();
  for (const auto& e : action::find_minima_2d(s, g)) {
    m2.push_back({{"theta_a", e.theta_a}, {"theta_b", e.theta_b}, {"V", e.value}});
  }
  return {{"ring", "two"}, {"cut_minima", minima}, {"cut_barrier", rep.barrier},
          {"cut_is_two_level", rep.is_two_level}, {"minima_2d", m2}};
}

json run_spectrum(const json& p, Artifacts& out) {
  spectrum::QuantizedWellSpec s;
  s.u = p["u"];
  s.j = p["j"];
  s.j_prime = p["j_prime"];
  s.n_sites = p["n_sites"];
  s.flux = p["flux"];
  s.grid_points = p["grid_points"];
  s.max_grid_points = p["max_grid_points"];
  s.rel_tol = p["rel_tol"];
  s.domain_halfwidth = p["domain_halfwidth"];
  const auto tls = spectrum::quantize_double_well(s);
  const double delta = s.j_prime * (s.n_sites - 1) / (2.0 * s.j);
  const auto pauli = spectrum::pauli_reduction(tls, s.flux, delta);
  json res = {{"gap", tls.gap},
              {"energies", tls.energies},
              {"theta01", tls.theta01},
              {"grid_points", tls.grid_points},
              {"grid_step", tls.grid_step},
              {"gap_change", tls.gap_change},
              {"delta", delta},
              {"pauli", {{"eps_z", pauli.eps_z}, {"eps_x", pauli.eps_x}}}};
  if (delta > 1.0) {
    const double w = spectrum::wkb_gap(s.u, s.j_prime, delta);
    res["wkb_gap"] = w;
    res["numeric_over_wkb"] = tls.gap / w;
  } else {
    res["wkb_gap"] = nullptr;
  }
  if (p["write_wavefunctions"]) {
    std::vector<double> v;
    for (double t : tls.theta) v.push_back(spectrum::well_potential(t, s));
    out.csv("wavefunctions.csv", {"theta", "V", "psi0", "psi1", "psi2", "psi3"},
            {tls.theta, v, tls.psi0, tls.psi1, tls.psi2, tls.psi3});
  }
  out.write_json("spectrum.json", res);
  return res;
}

json run_dynamics(const json& p, Artifacts& out) {
  model::ReducedDynamicsParams rp;
  rp.lam = p["lambda_rho"];
  rp.rho = 1.0;
  rp.drive = p["drive"];
  rp.g = p["g"];
  const dynamics::GPState s0{p["z0"].get<double>(), p["theta0"].get<double>()};
  const auto tr = dynamics::integrate(s0, rp, p["t_end"], p["dt"], p["stride"]);
  const auto rep = dynamics::classify_regime(rp, s0);
  std::vector<double> t_phys, z, th;
  for (size_t i = 0; i < tr.times.size(); ++i) {
    t_phys.push_back(tr.times[i] / (2.0 * rp.g));
    z.push_back(tr.states[i].z);
    th.push_back(tr.states[i].theta);
  }
  std::vector<std::string> header = {"s_tilde", "t", "z", "theta", "energy"};
  std::vector<std::vector<double>> cols = {tr.times, t_phys, z, th, tr.energy};
  if (p["analytic"]) {
    std::vector<double> za;
    if (rp.drive == 0.0) {
      for (double x : tr.times) za.push_back(dynamics::analytic_delta0(x, rp, s0));
    } else {
      const auto q = dynamics::quartic_data(rp, s0);
      for (double x : tr.times) za.push_back(dynamics::analytic_weierstrass(x, rp, q));
    }
    header.push_back("z_analytic");
    cols.push_back(za);
  }
  out.csv("trajectory.csv", header, cols);
  const double w0 = dynamics::omega0_small_coupling(rp, s0.z);
  json res = {{"label", rep.label},
              {"omega", rep.omega},
              {"omega0", w0},
              {"omega_over_omega0", rep.omega / w0},
              {"z_bar", rep.z_bar},
              {"modulus", rep.modulus},
              {"g2", rep.g2},
              {"g3", rep.g3},
              {"discriminant", rep.discriminant},
              {"quartic_roots", rep.quartic_roots},
              {"energy", dynamics::conserved_energy(s0, rp)},
              {"energy_drift", tr.energy_drift},
              {"dt_used", tr.dt}};
  if (rp.drive != 0.0) res["omega_drive_small_coupling"] = dynamics::omega_drive_small_coupling(rp, s0.z);
  if (z.size() >= 8) {
    const double wf = 2.0 * rp.g * dynamics::dominant_frequency(z, tr.times[1] - tr.times[0]);
    res["omega_fft"] = wf;
    res["omega_fft_over_omega0"] = wf / w0;
  }
  out.write_json("regime.json", res);
  return res;
}

json run_tof(const json& p, Artifacts& out) {
  model::LadderParams lp;
  lp.n_sites = p["n_sites"];
  lp.t = p["t"];
  lp.flux_a = p["flux_a"];
  lp.flux_b = p["flux_b"];
  const double n_total = p["filling"].get<double>() * lp.n_sites * 2;
  const auto form = p["mixing_form"] == "plus" ? tof::MixingForm::Plus : tof::MixingForm::Difference;
  tof::ImageSpec spec;
  spec.pixels = p["pixels"];
  spec.extent = p["extent"];
  spec.radius = p["radius"];
  spec.separation = p["separation"];
  if (p.contains("wannier_width")) spec.wannier_width = p["wannier_width"].get<double>();
  const std::string comp = p["component"];
  spec.component = comp == "direct" ? tof::Component::Direct
                   : comp == "cross" ? tof::Component::Cross
                                     : tof::Component::Total;
  const int bits = p["pgm_bits"];
  std::optional<double> imbalance;
  if (p.contains("n_imbalance")) imbalance = p["n_imbalance"].get<double>();

  json runs = json::array();
  const auto& gs = p["g_values"];
  for (size_t gi = 0; gi < gs.size(); ++gi) {
    lp.g = gs[gi];
    const auto s = tof::bogoliubov_spectrum(lp, form);
    const auto occ = tof::solve_chemical_potentials(s, n_total, p["temperature"], imbalance);
    json run = {{"g", lp.g},
                {"mu", occ.mu},
                {"delta_mu", occ.delta_mu},
                {"mu_alpha", occ.mu_alpha},
                {"mu_beta", occ.mu_beta},
                {"rotation_residual", tof::rotation_residual(s)},
                {"kz_modulation_at_ky_2",
                 tof::kz_modulation(0.0, 2.0, s, tof::correlators(s, occ), spec.radius, spec.separation)}};
    json images = json::array();
    for (const auto& pl : p["planes"]) {
      spec.plane = pl == "kxky" ? tof::Plane::XY : tof::Plane::YZ;
      const auto img = tof::momentum_density(s, occ, spec);
      const std::string base = "tof_" + pl.get<std::string>() + "_g" + std::to_string(gi);
      const double vmax = max_of(img.values);
      out.pgm(base + ".pgm", img.pixels, img.pixels, img.values, bits, vmax);
      if (p["write_csv"]) {
        std::vector<double> a, b, v;
        for (int r = 0; r < img.pixels; ++r) {
          for (int c = 0; c < img.pixels; ++c) {
            a.push_back(img.axis(c));
            b.push_back(img.axis(r));
            v.push_back(img.at(r, c));
          }
        }
        const bool xy = spec.plane == tof::Plane::XY;
        out.csv(base + ".csv", {xy ? "kx" : "ky", xy ? "ky" : "kz", "rho"}, {a, b, v});
      }
      json ij = {{"file", base + ".pgm"}, {"plane", pl}, {"max", vmax}, {"wannier_width", img.wannier_width}};
      if (spec.plane == tof::Plane::XY) ij["fringe_maxima"] = tof::fringe_maxima(img);
      images.push_back(ij);
    }
    run["images"] = images;
    runs.push_back(run);
  }
  json res = {{"n_total", n_total}, {"runs", runs}};
  out.write_json("tof.json", res);
  return res;
}

json complex_json(std::complex<double> c) { return json::array({c.real(), c.imag()}); }

json run_gates(const json& p, Artifacts& out) {
  std::vector<gates::CircuitStep> steps;
  for (const auto& st : p["circuit"]) {
    gates::CircuitStep c;
    c.gate = st["gate"];
    if (st.contains("qubit")) c.qubits = {st["qubit"].get<int>()};
    c.eps = st["eps"];
    c.tau = st["tau"];
    c.alpha = st["alpha"];
    c.coupling_ratio = st["coupling_ratio"];
    steps.push_back(c);
  }
  const auto u = gates::compose(steps);
  json matrix = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(complex_json(u(r, c)));
    matrix.push_back(row);
  }
  const auto m = gates::makhlin_invariants(u);
  json res = {{"matrix", matrix},
              {"unitarity_error", gates::unitarity_error(u)},
              {"makhlin", {{"g1", complex_json(m.g1)}, {"g2", m.g2}}}};
  if (p["compare_to"] != "none") {
    const auto ref = p["compare_to"] == "cnot" ? gates::cnot() : gates::Gate2(gates::Gate2::Identity());
    const auto eq = gates::local_equivalence(u, ref, p["tolerance"]);
    res["comparison"] = {{"to", p["compare_to"]},
                         {"equal_up_to_phase", eq.equal_up_to_phase},
                         {"makhlin_match", eq.makhlin_match},
                         {"phase_stripped_distance", eq.distance}};
  }
  out.write_json("gate.json", res);
  return res;
}

json run_kinoform(const json& p, std::uint64_t seed, Artifacts& out) {
  const int grid = p["grid"];
  const auto target = kinoform::ring_lattice_target(p["n_wells"], p["radius_px"], p["well_width_px"],
                                                    p["weak_link_depth"], grid, p["guard_px"],
                                                    p["annulus_halfwidth_px"]);
  const auto beam = kinoform::truncated_gaussian_beam(grid, p["beam_waist_px"], p["truncation_px"], p["slm_pitch"]);
  kinoform::MrafOptions o;
  o.mixing = p["mixing"];
  o.max_iterations = p["max_iterations"];
  o.tolerance = p["tolerance"];
  o.divergence_margin = p["divergence_margin"];
  const std::string start = p["start"];
  o.start = start == "flat" ? kinoform::StartPhase::Flat
            : start == "random" ? kinoform::StartPhase::Random
                                : kinoform::StartPhase::Conical;
  o.seed = p.contains("seed") ? p["seed"].get<std::uint64_t>() : seed;
  o.phase_levels = p["phase_levels"];
  o.focal_pitch = p["focal_pitch"];
  const auto r = kinoform::mraf_solve(beam, target, o);

  // phase as SLM grey levels: 0..255 over [0, 2 pi)
  std::vector<double> levels;
  for (double ph : r.phase_mask) levels.push_back(std::fmod(std::round(ph / (2 * kPi) * 256.0), 256.0));
  out.pgm("phase_mask.pgm", grid, grid, levels, 8, 255.0);
  out.pgm("intensity.pgm", grid, grid, r.intensity, 16, max_of(r.intensity));
  out.pgm("target.pgm", grid, grid, target.intensity, 16, max_of(target.intensity));
  std::vector<double> it, best;
  for (size_t i = 0; i < r.rms_trace.size(); ++i) it.push_back(i + 1);
  out.csv("trace.csv", {"iteration", "rms", "best_rms"}, {it, r.rms_trace, r.best_trace});
  if (p["write_csv"]) {
    std::vector<double> rows, cols;
    for (int a = 0; a < grid; ++a) {
      for (int b = 0; b < grid; ++b) {
        rows.push_back(a);
        cols.push_back(b);
      }
    }
    out.csv("kinoform.csv", {"row", "col", "phase", "intensity", "target"},
            {rows, cols, r.phase_mask, r.intensity, target.intensity});
  }

  json res = {{"rms_error", r.rms_error},
              {"rms_error_unquantized", r.rms_error_unquantized},
              {"efficiency", r.efficiency},
              {"noise_power", r.noise_power},
              {"loss", r.loss},
              {"iterations", r.iterations}};
  const std::vector<double> zs = p["axial_z"];
  if (!zs.empty()) {
    const auto scan = kinoform::axial_scan(r, target, zs, p["radius_px"], p["wavelength"]);
    std::vector<double> z, rms, rad;
    double worst = 0.0;
    bool has0 = false;
    for (const auto& a : scan) {
      z.push_back(a.z_over_r);
      rms.push_back(a.rms_error);
      rad.push_back(a.fitted_radius);
      worst = std::max(worst, a.rms_error / r.rms_error);
      has0 = has0 || a.z_over_r == 0.0;
    }
    out.csv("axial.csv", {"z_over_r", "rms_error", "fitted_radius_px"}, {z, rms, rad});
    res["axial_max_rms_ratio"] = worst;
    res["radius_drift_slope"] = has0 ? json(kinoform::radius_drift_slope(scan)) : json(nullptr);
  }
  out.write_json("kinoform.json", res);
  return res;
}

json run_geometry(const json& p, Artifacts& out) {
  model::TrapGeometry g;
  g.wavelength = p["wavelength"];
  g.focal_length = p["focal_length"];
  g.beam_separation = p["beam_separation"];
  g.atom_mass = p["atom_mass"];
  const double d = model::ring_separation(g);
  json res = {{"ring_separation_m", d}, {"recoil_energy_j", model::recoil_energy(g.wavelength, g.atom_mass)}};
  if (p.contains("stack_potential_depth")) {
    const double v0 = p["stack_potential_depth"].get<double>() * model::recoil_energy(g.wavelength, g.atom_mass);
    const double tun = model::wkb_inter_ring_tunnelling(g.atom_mass, v0, d, model::kHbar);
    res["barrier_depth_j"] = v0;
    res["wkb_tunnelling_rate_per_s"] = tun;
  }
  if (p.contains("raman")) {
    const json& r = p["raman"];
    const double sep = r.contains("separation") ? r["separation"].get<double>() : d;
    res["raman_shift_hz"] = model::raman_detuning_shift(r["gradient_g_per_cm"], sep, r["g_f"], r["delta_mf"]);
    res["raman_separation_m"] = sep;
  }
  out.write_json("geometry.json", res);
  return res;
}

void error_json(std::ostream& err, const std::string& kind, const std::string& message, int code,
                const std::string& path = "") {
  json e = {{"error", {{"kind", kind}, {"message", message}}}, {"exit_code", code}};
  if (!path.empty()) e["error"]["path"] = path;
  err << e.dump() << "\n";
}

}  // namespace

int run(const json& config_in, const Flags& flags, std::ostream& out, std::ostream& err) {
  json config = config_in;
  try {
    validate(config, schema_for("run_config"));
    apply_defaults(config, schema_for("run_config"));
    const std::string sub = config["subcommand"];
    const json& schema = schema_for(sub);
    validate(config["params"], schema, "$.params");
    apply_defaults(config["params"], schema);
    if (flags.output) config["output_dir"] = *flags.output;
    if (flags.validate_only) {
      if (!flags.quiet) out << json{{"valid", true}, {"subcommand", sub}, {"config", config}}.dump(2) << "\n";
      return kExitOk;
    }

    Artifacts art(config["output_dir"].get<std::string>());
    const json& p = config["params"];
    json summary;
    if (sub == "potential") summary = run_potential(p, art);
    else if (sub == "spectrum") summary = run_spectrum(p, art);
    else if (sub == "dynamics") summary = run_dynamics(p, art);
    else if (sub == "tof") summary = run_tof(p, art);
    else if (sub == "gates") summary = run_gates(p, art);
    else if (sub == "kinoform") summary = run_kinoform(p, config["seed"].get<std::uint64_t>(), art);
    else summary = run_geometry(p, art);
    if (sub == "potential") art.write_json("potential.json", summary);

    json manifest = {{"tool", "ringqubit"},
                     {"version", RINGQUBIT_VERSION},
                     {"subcommand", sub},
                     {"config", config},
                     {"files", art.manifest_files()},
                     {"libraries",
                      {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                     "." + std::to_string(EIGEN_MINOR_VERSION)},
                       {"fftw", fft::backend_version()},
                       {"boost", BOOST_LIB_VERSION},
                       {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
    art.text("manifest.json", manifest.dump(2) + "\n", "json");
    if (!flags.quiet) out << json{{"subcommand", sub}, {"result", summary}}.dump(2) << "\n";
    return kExitOk;
  } catch (const SchemaError& e) {
    error_json(err, "schema", e.what(), kExitConfig, e.path());
    return kExitConfig;
  } catch (const IoError& e) {
    error_json(err, "io", e.what(), kExitConfig);
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    error_json(err, "config", e.what(), kExitConfig);
    return kExitConfig;
  } catch (const json::exception& e) {
    error_json(err, "config", e.what(), kExitConfig);
    return kExitConfig;
  } catch (const NumericError& e) {
    error_json(err, "numeric", e.what(), kExitNumeric);
    return kExitNumeric;
  } catch (const std::exception& e) {
    error_json(err, "numeric", e.what(), kExitNumeric);
    return kExitNumeric;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ring-lattice flux qubit toolkit"};
  std::string subcommand;
  std::string config_path;
  std::string output;
  Flags flags;
  app.add_option("subcommand", subcommand, "potential, spectrum, dynamics, tof, gates, kinoform or geometry");
  app.add_option("--config", config_path, "JSON run config")->required();
  app.add_option("--output", output, "output directory, overrides output_dir");
  app.add_flag("--validate-only", flags.validate_only, "schema checks only, no computation");
  app.add_flag("--quiet", flags.quiet, "no summary on stdout");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    error_json(err, "usage", e.what(), kExitConfig);
    return kExitConfig;
  }
  if (!output.empty()) flags.output = output;

  json config;
  {
    std::ifstream f(config_path);
    if (!f) {
      error_json(err, "io", "cannot read config '" + config_path + "'", kExitConfig);
      return kExitConfig;
    }
    try {
      config = json::parse(f);
    } catch (const json::parse_error& e) {
      error_json(err, "config", std::string("invalid JSON: ") + e.what(), kExitConfig);
      return kExitConfig;
    }
  }
  if (!subcommand.empty()) {
    if (!config.is_object()) {
      error_json(err, "schema", "$: expected object", kExitConfig, "$");
      return kExitConfig;
    }
    if (config.contains("subcommand") && config["subcommand"] != subcommand) {
      error_json(err, "config",
                 "subcommand '" + subcommand + "' disagrees with config subcommand " + config["subcommand"].dump(),
                 kExitConfig);
      return kExitConfig;
    }
    config["subcommand"] = subcommand;
  }
  return run(config, flags, out, err);
}

}  // namespace ringqubit::cli
