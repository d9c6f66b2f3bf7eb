// omsim: command line front end for the optomech library. Subcommands solve
// operating points, sweep detuning or membrane position, emit spectra and
// temperature estimates, close the fit loop, and run the stochastic oracle.
// All output is CSV with a header row naming units; --check re-derives every
// file and diffs it against what is on disk instead of writing.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "optomech/config.hpp"
#include "optomech/constants.hpp"
#include "optomech/csv.hpp"
#include "optomech/errors.hpp"
#include "optomech/peak_fit.hpp"
#include "optomech/response.hpp"
#include "optomech/sde_oracle.hpp"
#include "optomech/slab_optics.hpp"
#include "optomech/spectra.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/thermometry.hpp"
#include "optomech/welch.hpp"

namespace om = optomech;

namespace {

struct Ctx {
  om::ConfigMap cm;
  std::string out_dir = ".";
  uint64_t seed = 1;
  bool check = false;
  std::optional<std::string> grid;
  int mismatches = 0;
};

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  if (dir.back() == '/') return dir + name;
  return dir + "/" + name;
}

// Writes the document, or under --check compares it with the file on disk.
void emit(Ctx& ctx, const std::string& name, const om::CsvDoc& doc) {
  const std::string path = join_path(ctx.out_dir, name);
  if (!ctx.check) {
    om::write_text_file(path, doc.text());
    std::printf("wrote %s\n", path.c_str());
    return;
  }
  std::string existing;
  try {
    existing = om::read_text_file(path);
  } catch (const om::Error&) {
    std::fprintf(stderr, "check: %s is missing\n", path.c_str());
    ++ctx.mismatches;
    return;
  }
  if (existing == doc.text()) {
    std::printf("check ok: %s\n", path.c_str());
  } else {
    std::fprintf(stderr, "check mismatch: %s\n", path.c_str());
    ++ctx.mismatches;
  }
}

struct GridSpec {
  double start, stop;
  int count;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g{};
  char extra = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &g.start, &g.stop, &g.count, &extra) != 3)
    om::fail(om::errc::bad_value, "--grid expects start:stop:count, got '" + text + "'");
  if (g.count < 2) om::fail(om::errc::bad_value, "--grid count must be >= 2");
  return g;
}

std::vector<double> linspace(const GridSpec& g) {
  std::vector<double> v(std::size_t(g.count));
  for (int i = 0; i < g.count; ++i)
    v[std::size_t(i)] = g.start + (g.stop - g.start) * double(i) / double(g.count - 1);
  return v;
}

std::vector<double> grid_or(const Ctx& ctx, const GridSpec& fallback) {
  return linspace(ctx.grid ? parse_grid(*ctx.grid) : fallback);
}

// Index-parallel map with deterministic output order.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned nt = std::thread::hardware_concurrency();
  nt = std::min(nt == 0 ? 1u : nt, 8u);
  if (nt < 2 || n < 8) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_err;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_err) first_err = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_err) std::rethrow_exception(first_err);
}

// Membrane-optics commands need the slab model; a direct-mode config is
// upgraded in place with the nominal membrane so they work out of the box.
void slabify(om::ConfigMap& cm) {
  cm.erase("target_g_over_omega_m");
  cm.erase("target_h_over_omega_m");
  cm.erase("delta0_hz");
  cm.erase("domega_dz");
  cm.erase("d2omega_dz2");
  cm.erase("kappa1_hz");
  cm.erase("dkappa1_dz");
  cm["dispersion_mode"] = "slab";
  if (!cm.count("membrane_thickness_m")) cm["membrane_thickness_m"] = "50e-9";
  if (!cm.count("membrane_n_real")) cm["membrane_n_real"] = "2.1";
  if (!cm.count("membrane_n_imag")) cm["membrane_n_imag"] = "2e-6";
}

// One-sided per-Hz density from the library's two-sided angular convention.
constexpr double k_one_sided_hz = 2.0 * om::two_pi;

struct SpectrumRow {
  double freq_hz, s_x, s_q, s_th, s_rp, s_abs, floor;
};

SpectrumRow spectrum_row(double w, const om::OperatingPoint& op, const om::SystemParams& p) {
  const om::SpectrumParts parts = om::noise_parts(w, op, p.mech, p.bath);
  const double chi2 = std::norm(om::chi_eff(w, op, p.mech));
  SpectrumRow row;
  row.freq_hz = w / om::two_pi;
  row.s_th = k_one_sided_hz * chi2 * parts.s_th;
  row.s_rp = k_one_sided_hz * chi2 * parts.s_rp;
  row.s_abs = k_one_sided_hz * chi2 * parts.s_abs;
  row.s_q = row.s_th + row.s_rp + row.s_abs;
  row.floor = k_one_sided_hz * om::detection_floor(w, op, p);
  row.s_x = p.mech.x_zpf * p.mech.x_zpf * row.s_q + row.floor;
  return row;
}

const std::vector<std::string>& spectrum_header() {
  static const std::vector<std::string> h = {
      "freq_hz", "s_x_det_m2_per_hz", "s_q", "s_th_part", "s_rp_part", "s_abs_part",
      "floor"};
  return h;
}

// Peak-evaluated effective dynamics; falls back to the bare frequency when no
// damped peak exists (anti-damped points on a blue sweep).
om::EffectiveDynamics dynamics_at_peak(const om::OperatingPoint& op,
                                       const om::MechanicalParams& mech) {
  try {
    return om::effective_dynamics(om::self_consistent_peak(op, mech), op, mech);
  } catch (const om::Error& e) {
    if (e.code() != om::errc::anti_damped) throw;
    return om::effective_dynamics(mech.omega_m, op, mech);
  }
}

void run_steady(Ctx& ctx) {
  const om::SystemParams p = om::build_params(ctx.cm);
  auto disp = om::make_dispersion(p);

  std::vector<om::OperatingPoint> branches;
  if (p.solve_mode == om::SolveMode::detuning) {
    branches.push_back(om::solve_fixed_detuning(p, *disp));
  } else {
    GridSpec window{};
    if (ctx.grid) {
      window = parse_grid(*ctx.grid);
    } else {
      const double zpf = p.mech.x_zpf * p.mech.overlap;
      const double kt = p.cavity.kappa0 + p.cavity.kappa2 + p.cavity.kappa_excess;
      const double alpha_sq = p.drive.e_amp * p.drive.e_amp / (kt * kt);
      const double pull =
          std::abs(disp->domega_dz(p.membrane.z0)) * zpf * alpha_sq / p.mech.omega_m;
      window = {-(1.2 * pull + 50.0), 1.2 * pull + 50.0, 2048};
    }
    branches = om::solve_fixed_laser(p, *disp, p.drive.omega_l, window.start,
                                     window.stop, window.count);
  }

  om::CsvDoc doc;
  doc.header({"branch_id", "q_s", "alpha_s_sq", "delta_rad_s", "kappa_T", "g",
              "g_probe", "h", "gamma_abs", "stable"});
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const om::OperatingPoint& op = branches[i];
    doc.row({om::format_int(static_cast<long long>(i)), om::format_double(op.q_s),
             om::format_double(op.alpha_s * op.alpha_s), om::format_double(op.delta),
             om::format_double(op.kappa_t), om::format_double(op.g),
             om::format_double(op.g_probe), om::format_double(op.h),
             om::format_double(op.gamma_abs), om::format_int(op.static_stable ? 1 : 0)});
    const om::EffectiveDynamics ed = dynamics_at_peak(op, p.mech);
    std::printf("branch %zu: q_s = %.6g, delta/omega_m = %.4f, gamma_eff/gamma_m = %.4f, %s\n",
                i, op.q_s, op.delta / p.mech.omega_m, ed.gamma_eff / p.mech.gamma_m,
                op.static_stable ? "stable" : "unstable");
  }
  emit(ctx, "steady.csv", doc);
}

void run_mode_sweep(Ctx& ctx) {
  om::ConfigMap cm = ctx.cm;
  slabify(cm);
  const om::SystemParams p = om::build_params(cm);
  auto disp = om::make_dispersion(p);

  const double half_wl = 0.5 * p.drive.wavelength;
  const std::vector<double> zs = grid_or(ctx, {0.0, half_wl, 200});

  std::vector<std::array<double, 5>> rows(zs.size());
  parallel_for(zs.size(), [&](std::size_t i) {
    const double z = zs[i];
    rows[i] = {z, disp->omega(z) - p.cavity.omega_ref, disp->domega_dz(z),
               disp->d2omega_dz2(z), disp->kappa1(z)};
  });

  om::CsvDoc doc;
  doc.header({"z0_m", "omega_shift_rad_s", "d_omega_dz", "d2_omega_dz2", "kappa1_rad_s"});
  for (const auto& r : rows) doc.numeric_row({r[0], r[1], r[2], r[3], r[4]});
  emit(ctx, "mode_sweep.csv", doc);
}

void sweep_detuning_rows(const om::SystemParams& base, const std::vector<double>& deltas,
                         std::vector<std::array<double, 3>>& rows) {
  auto disp = om::make_dispersion(base);
  rows.resize(deltas.size());
  parallel_for(deltas.size(), [&](std::size_t i) {
    om::SystemParams p = base;
    p.drive.detuning = deltas[i] * base.mech.omega_m;
    const om::OperatingPoint op = om::solve_fixed_detuning(p, *disp);
    const om::EffectiveDynamics ed = dynamics_at_peak(op, p.mech);
    rows[i] = {deltas[i], ed.gamma_eff / p.mech.gamma_m,
               (ed.omega_eff - p.mech.omega_m) / om::two_pi};
  });
}

void run_sweep_detuning(Ctx& ctx) {
  const om::SystemParams p = om::build_params(ctx.cm);
  const std::vector<double> deltas = grid_or(ctx, {0.08, 1.7, 200});
  std::vector<std::array<double, 3>> rows;
  sweep_detuning_rows(p, deltas, rows);

  om::CsvDoc doc;
  doc.header({"delta_over_omega_m", "gamma_eff_over_gamma_m", "omega_eff_minus_omega_m_hz"});
  for (const auto& r : rows) doc.numeric_row({r[0], r[1], r[2]});
  emit(ctx, "sweep_detuning.csv", doc);
}

void sweep_position_rows(const om::SystemParams& base, const std::vector<double>& zs,
                         std::vector<std::array<double, 3>>& rows) {
  rows.resize(zs.size());
  parallel_for(zs.size(), [&](std::size_t i) {
    om::SystemParams p = base;
    p.membrane.z0 = zs[i];
    auto disp = om::make_dispersion(p);
    const om::OperatingPoint op = om::solve_fixed_detuning(p, *disp);
    const om::EffectiveDynamics ed = dynamics_at_peak(op, p.mech);
    rows[i] = {zs[i], (ed.omega_eff - p.mech.omega_m) / om::two_pi,
               disp->d2omega_dz2(op.z_s)};
  });
}

void run_sweep_position(Ctx& ctx) {
  om::ConfigMap cm = ctx.cm;
  slabify(cm);
  cm["detuning_hz"] = "0";
  const om::SystemParams p = om::build_params(cm);

  // node -> antinode: a quarter wavelength starting at the cavity midpoint
  const std::vector<double> zs = grid_or(ctx, {0.0, 0.25 * p.drive.wavelength, 120});
  std::vector<std::array<double, 3>> rows;
  sweep_position_rows(p, zs, rows);

  om::CsvDoc doc;
  doc.header({"z0_m", "omega_eff_minus_omega_m_hz", "d2_omega_dz2"});
  for (const auto& r : rows) doc.numeric_row({r[0], r[1], r[2]});
  emit(ctx, "sweep_position.csv", doc);
}

void run_spectrum(Ctx& ctx) {
  const om::SystemParams p = om::build_params(ctx.cm);
  auto disp = om::make_dispersion(p);
  const om::OperatingPoint op = om::solve_fixed_detuning(p, *disp);

  std::vector<double> ws;
  if (ctx.grid) {
    const GridSpec g = parse_grid(*ctx.grid);
    for (double f : linspace(g)) ws.push_back(om::two_pi * f);
  } else {
    ws = om::resonance_grid(op, p.mech);
  }

  om::CsvDoc doc;
  doc.header(spectrum_header());
  for (double w : ws) {
    const SpectrumRow r = spectrum_row(w, op, p);
    doc.numeric_row({r.freq_hz, r.s_x, r.s_q, r.s_th, r.s_rp, r.s_abs, r.floor});
  }
  emit(ctx, "spectrum.csv", doc);
}

void thermometry_rows(const om::SystemParams& base, const std::vector<double>& deltas,
                      std::vector<std::array<double, 5>>& rows) {
  auto disp = om::make_dispersion(base);
  rows.resize(deltas.size());
  parallel_for(deltas.size(), [&](std::size_t i) {
    om::SystemParams p = base;
    p.drive.detuning = deltas[i] * base.mech.omega_m;
    const om::OperatingPoint op = om::solve_fixed_detuning(p, *disp);
    const om::TemperatureReport rep = om::thermometry_report(op, p.mech, p.bath);
    rows[i] = {deltas[i], rep.t_area_k, rep.t_gamma_k, rep.t_peak_k, rep.n_eff};
  });
}

void run_thermometry(Ctx& ctx) {
  const om::SystemParams p = om::build_params(ctx.cm);
  const std::vector<double> deltas = grid_or(ctx, {0.08, 1.7, 50});
  std::vector<std::array<double, 5>> rows;
  thermometry_rows(p, deltas, rows);

  om::CsvDoc doc;
  doc.header({"delta_over_omega_m", "t_area_K", "t_gamma_K", "t_peak_K", "n_eff"});
  for (const auto& r : rows) doc.numeric_row({r[0], r[1], r[2], r[3], r[4]});
  emit(ctx, "thermometry.csv", doc);
}

struct FitCmdOpts {
  std::string in_file;
  double window_hz = 0.0;
  int snapshots = 200;
  bool synth = false;
};

void run_fit(Ctx& ctx, const FitCmdOpts& opt) {
  const std::string in_path =
      opt.in_file.empty() ? join_path(ctx.out_dir, "spectrum.csv") : opt.in_file;
  const std::string text = om::read_text_file(in_path);

  // header + numeric rows; column 0 is freq_hz, column 1 the density
  std::vector<double> freq, psd;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const std::size_t c1 = line.find(',');
    if (c1 == std::string::npos)
      om::fail(om::errc::bad_value, in_path + ": expected at least two columns");
    std::size_t c2 = line.find(',', c1 + 1);
    if (c2 == std::string::npos) c2 = line.size();
    freq.push_back(std::strtod(line.c_str(), nullptr));
    psd.push_back(std::strtod(line.c_str() + c1 + 1, nullptr));
  }
  if (freq.size() < 12)
    om::fail(om::errc::bad_value, in_path + ": too few rows for a line fit");

  if (opt.window_hz > 0.0) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < psd.size(); ++i)
      if (psd[i] > psd[imax]) imax = i;
    const double f0 = freq[imax];
    std::vector<double> fw, pw;
    for (std::size_t i = 0; i < freq.size(); ++i)
      if (std::abs(freq[i] - f0) <= opt.window_hz) {
        fw.push_back(freq[i]);
        pw.push_back(psd[i]);
      }
    freq.swap(fw);
    psd.swap(pw);
  }

  std::vector<double> w(freq.size());
  for (std::size_t i = 0; i < freq.size(); ++i) w[i] = om::two_pi * freq[i];
  if (opt.synth) psd = om::synth_spectrum(psd, opt.snapshots, ctx.seed);

  const om::FitResult fit = om::fit_lorentzian(w, psd, opt.snapshots);
  om::CsvDoc doc;
  doc.header({"center_hz", "fwhm_hz", "height", "floor", "floor_slope", "center_err_hz",
              "fwhm_err_hz", "height_err", "residual_rms", "iterations"});
  doc.row({om::format_double(fit.center / om::two_pi), om::format_double(fit.fwhm / om::two_pi),
           om::format_double(fit.height), om::format_double(fit.floor),
           om::format_double(fit.floor_slope), om::format_double(fit.center_err / om::two_pi),
           om::format_double(fit.fwhm_err / om::two_pi), om::format_double(fit.height_err),
           om::format_double(fit.residual_rms), om::format_int(fit.iterations)});
  std::printf("fit: center = %.6f kHz, fwhm = %.3f Hz, rms = %.3f\n",
              fit.center / om::two_pi / 1e3, fit.fwhm / om::two_pi, fit.residual_rms);
  emit(ctx, "fit.csv", doc);
}

struct OracleCmdOpts {
  int trajectories = 2;
  double duration = 1.0;
  int stride = 16;
  std::size_t nfft = 1u << 20;
  int daniell = 9;
  bool nonlinear = false;
};

void run_oracle(Ctx& ctx, const OracleCmdOpts& opt) {
  const om::SystemParams p = om::build_params(ctx.cm);
  auto disp = om::make_dispersion(p);
  const om::OperatingPoint op = om::solve_fixed_detuning(p, *disp);

  om::SimConfig cfg;
  cfg.duration = opt.duration;
  cfg.trajectories = opt.trajectories;
  cfg.record_stride = opt.stride;
  cfg.seed = ctx.seed;
  cfg.mode = opt.nonlinear ? om::SimMode::nonlinear : om::SimMode::linear;

  const double dt = 0.05 / om::max_rate(op, p.mech);
  om::WelchAccumulator acc(opt.nfft, dt * opt.stride);
  int last_traj = -1;
  const om::SimSummary sum = om::integrate(
      p, op, cfg,
      [&](int traj, double q) {
        if (traj != last_traj) {
          acc.end_stream();
          last_traj = traj;
        }
        acc.push(q);
      },
      disp.get());

  const auto w = acc.omega();
  const auto psd = acc.psd();
  om::CsvDoc raw;
  raw.header({"freq_hz", "s_q_zpf2_per_hz"});
  for (std::size_t k = 0; k < w.size(); ++k)
    raw.numeric_row({w[k] / om::two_pi, k_one_sided_hz * psd[k]});
  emit(ctx, "oracle_psd.csv", raw);

  const std::vector<double> smooth = om::daniell_smooth(psd, opt.daniell);
  const double wp = om::self_consistent_peak(op, p.mech);
  const double ge = om::effective_dynamics(wp, op, p.mech).gamma_eff;

  om::CsvDoc cmp;
  cmp.header({"freq_hz", "s_q_oracle", "s_q_analytic", "ratio"});
  double ratio_acc = 0.0;
  int ratio_n = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] <= 0.0 || std::abs(w[k] - wp) > 8.0 * ge) continue;
    const double analytic = om::s_q(w[k], op, p.mech, p.bath);
    const double ratio = k_one_sided_hz * smooth[k] / (k_one_sided_hz * analytic);
    cmp.numeric_row({w[k] / om::two_pi, k_one_sided_hz * smooth[k],
                     k_one_sided_hz * analytic, ratio});
    ratio_acc += ratio;
    ++ratio_n;
  }
  emit(ctx, "oracle_compare.csv", cmp);

  const double s_qq = om::stationary_covariance(op, p.mech, p.bath)[0];
  std::printf("oracle: %d traj x %.3g s, %zu segments, q_var = %.6g (lyapunov %.6g), "
              "mean band ratio = %.4f over %d bins\n",
              sum.trajectories, opt.duration, acc.segments(), sum.q_var, s_qq,
              ratio_n > 0 ? ratio_acc / ratio_n : 0.0, ratio_n);
}

void run_figures(Ctx& ctx) {
  const om::SystemParams base = om::build_params(ctx.cm);

  // detected spectra at a ladder of detunings from weak pull to past the
  // sideband, on the nominal drive
  {
    auto disp = om::make_dispersion(base);
    const double det_khz[] = {30, 60, 180, 280, 320, 340, 355, 380, 410, 600};
    om::CsvDoc doc;
    std::vector<std::string> cols = {"delta_hz"};
    for (const std::string& c : spectrum_header()) cols.push_back(c);
    doc.header(cols);
    for (double f : det_khz) {
      om::SystemParams p = base;
      p.drive.detuning = om::two_pi * f * 1e3;
      const om::OperatingPoint op = om::solve_fixed_detuning(p, *disp);
      for (double wv : om::resonance_grid(op, p.mech, 600, 120)) {
        const SpectrumRow r = spectrum_row(wv, op, p);
        doc.numeric_row({f * 1e3, r.freq_hz, r.s_x, r.s_q, r.s_th, r.s_rp, r.s_abs, r.floor});
      }
    }
    emit(ctx, "fig2.csv", doc);
  }

  // damping and spring curves on the nominal drive
  {
    const std::vector<double> deltas = linspace({0.08, 1.7, 200});
    std::vector<std::array<double, 3>> rows;
    sweep_detuning_rows(base, deltas, rows);
    om::CsvDoc d3;
    d3.header({"delta_over_omega_m", "gamma_eff_over_gamma_m", "omega_eff_minus_omega_m_hz"});
    for (const auto& r : rows) d3.numeric_row({r[0], r[1], r[2]});
    emit(ctx, "fig3.csv", d3);
    om::CsvDoc d4;
    d4.header({"delta_over_omega_m", "omega_eff_minus_omega_m_hz"});
    for (const auto& r : rows) d4.numeric_row({r[0], r[2]});
    emit(ctx, "fig4.csv", d4);
  }

  // quadratic shift across a node-to-antinode position sweep, weak drive,
  // zero detuning
  {
    om::ConfigMap cm = ctx.cm;
    slabify(cm);
    cm["detuning_hz"] = "0";
    cm["pump_power_w"] = "76e-6";
    const om::SystemParams p = om::build_params(cm);
    const std::vector<double> zs = linspace({0.0, 0.25 * p.drive.wavelength, 120});
    std::vector<std::array<double, 3>> rows;
    sweep_position_rows(p, zs, rows);
    om::CsvDoc doc;
    doc.header({"z0_m", "omega_eff_minus_omega_m_hz", "d2_omega_dz2"});
    for (const auto& r : rows) doc.numeric_row({r[0], r[1], r[2]});
    emit(ctx, "fig5.csv", doc);
  }

  // temperature estimators across detuning at the strong coupling level
  {
    om::ConfigMap cm = ctx.cm;
    om::apply_override(cm, "target_g_over_omega_m=-0.031");
    const om::SystemParams p = om::build_params(cm);
    const std::vector<double> deltas = linspace({0.08, 1.7, 50});
    std::vector<std::array<double, 5>> rows;
    thermometry_rows(p, deltas, rows);
    om::CsvDoc doc;
    doc.header({"delta_over_omega_m", "t_area_K", "t_gamma_K", "t_peak_K", "n_eff"});
    for (const auto& r : rows) doc.numeric_row({r[0], r[1], r[2], r[3], r[4]});
    emit(ctx, "fig6.csv", doc);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"membrane-in-cavity sideband cooling simulator"};
  app.require_subcommand(1);

  std::string params_file;
  std::vector<std::string> sets;
  Ctx ctx;
  app.add_option("--params", params_file, "configuration file (key = value lines)");
  app.add_option("--set", sets, "override one key=value (repeatable)")->take_all();
  app.add_option("--out", ctx.out_dir, "output directory for CSV files");
  app.add_option("--seed", ctx.seed, "random seed for synthesis and the oracle");
  std::string grid_text;
  CLI::Option* grid_opt =
      app.add_option("--grid", grid_text, "sweep grid as start:stop:count");
  app.add_flag("--check", ctx.check, "re-derive outputs and diff against disk");

  CLI::App* c_steady = app.add_subcommand("steady", "solve the classical operating point(s)");
  CLI::App* c_mode = app.add_subcommand("mode-sweep", "slab mode structure vs membrane position");
  CLI::App* c_sdet = app.add_subcommand("sweep-detuning", "effective damping and spring vs detuning");
  CLI::App* c_spos = app.add_subcommand("sweep-position", "frequency shift vs membrane position at zero detuning");
  CLI::App* c_spec = app.add_subcommand("spectrum", "displacement noise spectrum at the operating point");
  CLI::App* c_therm = app.add_subcommand("thermometry", "three temperature estimators vs detuning");
  CLI::App* c_fit = app.add_subcommand("fit", "lorentzian line fit of a spectrum CSV");
  CLI::App* c_oracle = app.add_subcommand("oracle", "stochastic trajectories, welch psd, analytic comparison");
  CLI::App* c_figs = app.add_subcommand("figures", "emit the standard figure CSV set (fig2..fig6)");

  FitCmdOpts fit_opt;
  c_fit->add_option("--in", fit_opt.in_file, "input spectrum CSV (default <out>/spectrum.csv)");
  c_fit->add_option("--window-hz", fit_opt.window_hz, "restrict to +-window around the maximum");
  c_fit->add_option("--snapshots", fit_opt.snapshots, "averaging count for noise weights");
  c_fit->add_flag("--synth", fit_opt.synth, "multiply finite-average noise onto the input first");

  OracleCmdOpts oracle_opt;
  c_oracle->add_option("--trajectories", oracle_opt.trajectories, "independent trajectories");
  c_oracle->add_option("--duration", oracle_opt.duration, "seconds per trajectory");
  c_oracle->add_option("--stride", oracle_opt.stride, "record every n-th step");
  c_oracle->add_option("--nfft", oracle_opt.nfft, "welch segment length (even)");
  c_oracle->add_option("--daniell", oracle_opt.daniell, "comparison smoothing halfwidth");
  c_oracle->add_flag("--nonlinear", oracle_opt.nonlinear, "splitting integrator instead of the linear propagator");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    ctx.cm = params_file.empty() ? om::default_config() : om::load_config_file(params_file);
    for (const std::string& s : sets) om::apply_override(ctx.cm, s);
    if (grid_opt->count() > 0) ctx.grid = grid_text;
    if (!ctx.check) {
      std::error_code ec;
      std::filesystem::create_directories(ctx.out_dir, ec);
    }

    if (c_steady->parsed()) run_steady(ctx);
    if (c_mode->parsed()) run_mode_sweep(ctx);
    if (c_sdet->parsed()) run_sweep_detuning(ctx);
    if (c_spos->parsed()) run_sweep_position(ctx);
    if (c_spec->parsed()) run_spectrum(ctx);
    if (c_therm->parsed()) run_thermometry(ctx);
    if (c_fit->parsed()) run_fit(ctx, fit_opt);
    if (c_oracle->parsed()) run_oracle(ctx, oracle_opt);
    if (c_figs->parsed()) run_figures(ctx);
  } catch (const om::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", om::errc_name(e.code()), e.what());
    return om::is_config_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return ctx.mismatches == 0 ? 0 : 1;
}
