#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "optomech/config.hpp"
#include "optomech/constants.hpp"
#include "optomech/spectra.hpp"
#include "test_helpers.hpp"

using namespace optomech;
using omtest::rel_err;
using omtest::reference_point;
using omtest::response_point;
using omtest::thrown_code;

namespace {

// Independent transcription of the force-noise parts through cavity filter
// factors 1 / (kappa + i (omega -+ delta)), the form the matrix algebra
// produces before collecting real denominators.
SpectrumParts parts_via_filters(double omega, const OperatingPoint& op,
                                const MechanicalParams& mech, const BathParams& bath) {
  using cd = std::complex<double>;
  const cd fm = 1.0 / cd(op.kappa_t, omega - op.delta);
  const cd fp = 1.0 / cd(op.kappa_t, -(omega + op.delta));
  SpectrumParts parts{};
  parts.s_th = bath.quantum_occupation
                   ? 0.0  // not reproduced here
                   : 2.0 * mech.gamma_m * (bath.n_thermal + 0.5);
  parts.s_rp = op.g * op.g * op.kappa_t * 0.5 * (std::norm(fm) + std::norm(fp));
  if (op.gamma_abs != 0.0) {
    parts.s_abs = op.gamma_abs * op.gamma_abs / (4.0 * op.kappa1) +
                  op.gamma_abs * op.g * op.delta * (fm * std::conj(fp)).real();
  }
  return parts;
}

}  // namespace

TEST_CASE("thermal force noise: flat classical form and quantum correction") {
  const MechanicalParams mech = default_params().mech;
  const BathParams bath = default_params().bath;
  OperatingPoint op = reference_point(mech);

  const double flat = 2.0 * mech.gamma_m * (bath.n_thermal + 0.5);
  for (double w : {0.2 * mech.omega_m, mech.omega_m, 3.0 * mech.omega_m}) {
    CHECK(noise_parts(w, op, mech, bath).s_th == flat);
  }

  BathParams qbath = bath;
  qbath.quantum_occupation = true;
  // at 295 K and sub-MHz frequencies the exact form is the flat one to ~1e-8
  CHECK(rel_err(noise_parts(mech.omega_m, op, mech, qbath).s_th, flat) < 1e-6);
  // continuity of the coth form into its omega -> 0 limit
  const double at_zero = noise_parts(0.0, op, mech, qbath).s_th;
  const double near_zero = noise_parts(1e-4 * mech.omega_m, op, mech, qbath).s_th;
  CHECK(rel_err(near_zero, at_zero) < 1e-6);
  // deep quantum regime: occupation frozen out, only zero-point motion left
  BathParams cold = qbath;
  cold.temperature = 1e-7;
  cold.n_thermal = thermal_occupation(mech.omega_m, 1e-7, true);
  CHECK(rel_err(noise_parts(mech.omega_m, op, mech, cold).s_th, mech.gamma_m) < 1e-9);
}

TEST_CASE("back-action parts match the cavity-filter transcription") {
  const MechanicalParams mech = default_params().mech;
  const BathParams bath = default_params().bath;
  const double om = mech.omega_m;
  OperatingPoint ops[] = {
      reference_point(mech),
      response_point(mech, -0.012, 0.7, two_pi * 70e3, 2e-5, 0.3 * 0.012 * om,
                     0.1 * two_pi * 70e3),
      response_point(mech, 0.02, -0.4, two_pi * 90e3, 0.0, -1e2, 0.2 * two_pi * 90e3),
  };
  for (const OperatingPoint& op : ops) {
    for (double w : {0.1 * om, 0.95 * om, om, 1.6 * om, 4.0 * om}) {
      SpectrumParts got = noise_parts(w, op, mech, bath);
      SpectrumParts want = parts_via_filters(w, op, mech, bath);
      CHECK(rel_err(got.s_rp, want.s_rp) < 1e-12);
      if (op.gamma_abs != 0.0) {
        CHECK(rel_err(got.s_abs, want.s_abs) < 1e-12);
      }
    }
  }
}

TEST_CASE("absorption channel: zero without coupling, guarded without loss") {
  const MechanicalParams mech = default_params().mech;
  const BathParams bath = default_params().bath;
  OperatingPoint op = response_point(mech, -0.01, 1.0, two_pi * 77e3, 0.0, 0.0,
                                     0.1 * two_pi * 77e3);
  CHECK(noise_parts(mech.omega_m, op, mech, bath).s_abs == 0.0);

  OperatingPoint bad = response_point(mech, -0.01, 1.0, two_pi * 77e3, 0.0, 50.0, 0.0);
  CHECK(thrown_code([&] { noise_parts(mech.omega_m, bad, mech, bath); }) ==
        errc::division_by_zero_kappa1);
}

TEST_CASE("displacement spectrum is the filtered sum of the parts") {
  const MechanicalParams mech = default_params().mech;
  const BathParams bath = default_params().bath;
  const double om = mech.omega_m;
  OperatingPoint ops[] = {
      reference_point(mech),
      response_point(mech, -0.012, 0.7, two_pi * 70e3, 2e-5, 0.3 * 0.012 * om,
                     0.1 * two_pi * 70e3),
  };
  for (const OperatingPoint& op : ops) {
    for (double w : {0.3 * om, om, 2.2 * om}) {
      SpectrumParts parts = noise_parts(w, op, mech, bath);
      const double want =
          std::norm(chi_eff(w, op, mech)) * (parts.s_th + parts.s_rp + parts.s_abs);
      CHECK(rel_err(s_q(w, op, mech, bath), want) < 1e-12);
    }
  }
}

TEST_CASE("bare on-resonance spectrum closes to the equipartition value") {
  const MechanicalParams mech = default_params().mech;
  const BathParams bath = default_params().bath;
  OperatingPoint op = response_point(mech, 0.0, 1.0, two_pi * 77e3);
  const double peak = s_q(mech.omega_m, op, mech, bath);
  CHECK(rel_err(peak * mech.gamma_m / (2.0 * (bath.n_thermal + 0.5)), 1.0) < 1e-12);
}

TEST_CASE("thermal noise dominates back-action at the measured drive") {
  const MechanicalParams mech = default_params().mech;
  const BathParams bath = default_params().bath;
  OperatingPoint op = reference_point(mech);
  SpectrumParts parts = noise_parts(mech.omega_m, op, mech, bath);
  CHECK(parts.s_rp + parts.s_abs < 1e-3 * parts.s_th);
  CHECK(parts.s_rp > 0.0);
}

TEST_CASE("configured detection floor is pinned at the mechanical frequency") {
  ConfigMap cm = default_config();
  apply_override(cm, "shot_floor_m_sqrt_hz=1e-16");
  SystemParams p = build_params(cm);
  auto disp = make_dispersion(p);
  OperatingPoint op = solve_fixed_detuning(p, *disp);

  const double at_om = detection_floor(p.mech.omega_m, op, p);
  CHECK(rel_err(4.0 * pi * at_om, 1e-16 * 1e-16) < 1e-12);

  // cavity-filter shape: flat to about a percent across the thermal peak,
  // strictly rising with frequency
  const double span = 50.0 * p.mech.gamma_m;
  double lo = 1e300, hi = 0.0, prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double w = p.mech.omega_m - span + 2.0 * span * double(i) / 100.0;
    const double f = detection_floor(w, op, p);
    lo = std::min(lo, f);
    hi = std::max(hi, f);
    CHECK(f > prev);
    prev = f;
  }
  CHECK(hi / lo < 1.01);
  CHECK(hi / lo > 1.001);
}

TEST_CASE("vacuum probe sets the floor through its coupling") {
  ConfigMap cm = default_config();
  apply_override(cm, "probe_power_w=1e-5");
  apply_override(cm, "probe_kappa_hz=30e3");
  apply_override(cm, "probe_overlap=0.9");
  apply_override(cm, "shot_floor_m_sqrt_hz=0");
  SystemParams p = build_params(cm);
  auto disp = make_dispersion(p);
  OperatingPoint op = solve_fixed_detuning(p, *disp);
  REQUIRE(op.g_probe != 0.0);
  REQUIRE(p.shot_floor == 0.0);

  for (double w : {0.5 * p.mech.omega_m, p.mech.omega_m, 2.0 * p.mech.omega_m}) {
    const double want = p.mech.x_zpf * p.mech.x_zpf *
                        (op.kappa_t * op.kappa_t + w * w) * 0.5 /
                        (op.g_probe * op.g_probe);
    CHECK(rel_err(detection_floor(w, op, p), want) < 1e-12);
    const double sx = p.mech.x_zpf * p.mech.x_zpf * s_q(w, op, p.mech, p.bath) +
                      detection_floor(w, op, p);
    CHECK(rel_err(s_x_detected(w, op, p), sx) < 1e-15);
  }

  // no shot floor, no probe: ideal detection
  ConfigMap cm0 = default_config();
  apply_override(cm0, "probe_power_w=0");
  apply_override(cm0, "shot_floor_m_sqrt_hz=0");
  SystemParams p0 = build_params(cm0);
  auto disp0 = make_dispersion(p0);
  OperatingPoint op0 = solve_fixed_detuning(p0, *disp0);
  CHECK(detection_floor(p0.mech.omega_m, op0, p0) == 0.0);
}

TEST_CASE("spectrum grid brackets the peak and stays ordered") {
  const MechanicalParams mech = default_params().mech;
  OperatingPoint op = reference_point(mech);
  std::vector<double> grid = resonance_grid(op, mech);
  REQUIRE(grid.size() > 2000);
  CHECK(grid.front() > 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] > grid[i - 1]);
  }
  const double peak = self_consistent_peak(op, mech);
  const double width = effective_dynamics(peak, op, mech).gamma_eff;
  CHECK(grid.front() < 0.05 * peak);
  CHECK(grid.back() > 2.0 * peak);
  // dense coverage through the line: spacing near the peak resolves gamma_eff
  double near_spacing = 1e300;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs(grid[i] - peak) < width) {
      near_spacing = std::min(near_spacing, grid[i] - grid[i - 1]);
    }
  }
  CHECK(near_spacing < 0.1 * width);

  // anti-damped point still yields a usable grid around the bare line
  OperatingPoint blue = response_point(mech, -0.01, -1.0, two_pi * 77e3);
  std::vector<double> bgrid = resonance_grid(blue, mech);
  CHECK(bgrid.size() > 2000);
  CHECK(bgrid.front() > 0.0);
  CHECK(bgrid.front() < mech.omega_m);
  CHECK(bgrid.back() > mech.omega_m);

  CHECK(thrown_code([&] { resonance_grid(op, mech, 8, 300); }) == errc::bad_argument);
  CHECK(thrown_code([&] { resonance_grid(op, mech, 2400, 4); }) == errc::bad_argument);
}
