#include "doctest.h"

#include <cmath>
#include <vector>

#include "optomech/config.hpp"
#include "optomech/constants.hpp"
#include "optomech/slab_optics.hpp"
#include "optomech/steady_state.hpp"
#include "test_helpers.hpp"

using namespace optomech;
using omtest::rel_err;
using omtest::thrown_code;

namespace {

// Minimal direct-dispersion system in zero-point units (x_zpf = 1, overlap = 1,
// omega_m = 1e6, kappa_t = 1e5). Drive and dispersion coefficients are the
// knobs the individual cases turn.
SystemParams toy_system(double e_sq, double delta0, double omega_l,
                        double domega_dz, double d2omega_dz2, double detuning) {
  SystemParams p{};
  p.mech = {1e6, 10.0, 1e5, 1e-12, 1.0, 1.0};
  p.cavity = {0.093, 1.5e4, 5e4, 5e4, 0.0, omega_l, pi * c_light / 0.093};
  p.membrane = {50e-9, 2.1, 0.0, 0.0};
  p.drive = {0.0, 1064e-9, omega_l, detuning, std::sqrt(e_sq), 0.0, 0.0, 0.0};
  p.bath = {295.0, 295.0 * k_boltzmann / (hbar * 1e6), false};
  p.dispersion = DispersionKind::direct;
  p.direct = {delta0, domega_dz, d2omega_dz2, 0.0, 0.0};
  p.solve_mode = SolveMode::laser;
  p.shot_floor = 0.0;
  return p;
}

// Drive strength for the cubic static balance in the form used below:
// e_sq = a * omega_m * kappa_t^2 / |domega_dz|, so a is the dimensionless
// pull amplitude. With delta0 = 3e5 and slope -50 the balance has three
// roots exactly when a sits inside the bistable window.
double drive_for(double a) { return a * 1e6 * 1e10 / 50.0; }

SystemParams bistable_system(double a, double omega_l) {
  return toy_system(drive_for(a), 3e5, omega_l, -50.0, 0.0, 0.0);
}

}  // namespace

TEST_CASE("operating point satisfies the static balance identities") {
  SystemParams p = default_params();
  auto disp = make_dispersion(p);
  OperatingPoint op = solve_fixed_detuning(p, *disp);
  const double zpf = p.mech.x_zpf * p.mech.overlap;
  const double e2 = p.drive.e_amp * p.drive.e_amp;

  CHECK(op.delta == p.drive.detuning);
  CHECK(op.static_stable);
  CHECK(op.alpha_s > 0.0);
  // Lorentzian intracavity amplitude
  CHECK(rel_err(op.alpha_s * op.alpha_s * (op.kappa_t * op.kappa_t + op.delta * op.delta),
                e2) < 1e-12);
  // radiation-pressure displacement balance
  const double pull = -disp->domega_dz(op.z_s) * zpf * op.alpha_s * op.alpha_s /
                      p.mech.omega_m;
  CHECK(rel_err(op.q_s, pull) < 1e-12);
  // field transcription at the shifted membrane position
  CHECK(op.z_s == p.membrane.z0 + zpf * op.q_s);
  CHECK(op.kappa1 == disp->kappa1(op.z_s));
  CHECK(op.kappa_t == p.cavity.kappa0 + p.cavity.kappa2 + p.cavity.kappa_excess + op.kappa1);
  CHECK(rel_err(op.g, -std::sqrt(2.0) * disp->domega_dz(op.z_s) * zpf * op.alpha_s) < 1e-12);
  CHECK(rel_err(op.h, disp->d2omega_dz2(op.z_s) * zpf * zpf * op.alpha_s * op.alpha_s) <
        1e-12);
  CHECK(op.gamma_abs == std::sqrt(2.0) * disp->dkappa1_dz(op.z_s) * zpf * op.alpha_s);
}

TEST_CASE("probe coupling follows the detection-beam formula") {
  ConfigMap cm = default_config();
  apply_override(cm, "probe_power_w=1e-5");
  apply_override(cm, "probe_kappa_hz=30e3");
  apply_override(cm, "probe_overlap=0.9");
  SystemParams p = build_params(cm);
  auto disp = make_dispersion(p);
  OperatingPoint op = solve_fixed_detuning(p, *disp);

  const double want = -2.0 * disp->domega_dz(op.z_s) * p.drive.probe_overlap *
                      std::sqrt(p.drive.probe_power * p.drive.probe_kappa /
                                (p.mech.mass * p.mech.omega_m * p.drive.omega_l *
                                 op.kappa_t * op.kappa_t));
  CHECK(op.g_probe != 0.0);
  CHECK(rel_err(op.g_probe, want) < 1e-12);

  // without probe power the coupling is identically zero
  ConfigMap cm0 = default_config();
  apply_override(cm0, "probe_power_w=0");
  SystemParams p0 = build_params(cm0);
  auto disp0 = make_dispersion(p0);
  CHECK(solve_fixed_detuning(p0, *disp0).g_probe == 0.0);
}

TEST_CASE("zero pump power gives the undisturbed membrane") {
  ConfigMap cm = default_config();
  apply_override(cm, "pump_power_w=0");
  apply_override(cm, "target_g_over_omega_m=0");
  apply_override(cm, "target_h_over_omega_m=0");
  SystemParams p = build_params(cm);
  auto disp = make_dispersion(p);
  OperatingPoint op = solve_fixed_detuning(p, *disp);
  CHECK(op.q_s == 0.0);
  CHECK(op.alpha_s == 0.0);
  CHECK(op.g == 0.0);
  CHECK(op.h == 0.0);
  CHECK(op.gamma_abs == 0.0);
  CHECK(op.static_stable);

  // same with a dispersive membrane but no light
  SystemParams pt = toy_system(0.0, 3e5, 1e8, -50.0, 1e3, 2e5);
  auto dispt = make_dispersion(pt);
  OperatingPoint opt = solve_fixed_detuning(pt, *dispt);
  CHECK(opt.q_s == 0.0);
  CHECK(opt.alpha_s == 0.0);
  CHECK(opt.g == 0.0);
  CHECK(opt.static_stable);
}

TEST_CASE("fixed-laser solve resolves all three bistable branches") {
  // cubic geometry: roots of q (kappa^2 + (3e5 - 50 q)^2) = a kappa^2 omega_m
  // at a = 8000 are 4000 and 4000 -+ 2000 sqrt(2), with balance-map slopes
  // 2 - sqrt(2), -1, 2 + sqrt(2)
  const double r1 = 4000.0 - 2000.0 * std::sqrt(2.0);
  const double r2 = 4000.0;
  const double r3 = 4000.0 + 2000.0 * std::sqrt(2.0);
  const double s1 = 2.0 - std::sqrt(2.0);
  const double s3 = 2.0 + std::sqrt(2.0);

  // small omega_l keeps omega(z) - omega_l exact in doubles
  SystemParams p = bistable_system(8000.0, 1e8);
  auto disp = make_dispersion(p);
  std::vector<OperatingPoint> ops = solve_fixed_laser(p, *disp, 1e8, 0.0, 10000.0);
  REQUIRE(ops.size() == 3);
  CHECK(rel_err(ops[0].q_s, r1) < 1e-9);
  CHECK(rel_err(ops[1].q_s, r2) < 1e-9);
  CHECK(rel_err(ops[2].q_s, r3) < 1e-9);
  CHECK(ops[0].static_stable);
  CHECK(!ops[1].static_stable);
  CHECK(ops[2].static_stable);

  for (const OperatingPoint& op : ops) {
    CHECK(std::abs(steady_residual_fixed_laser(p, *disp, 1e8, op.q_s)) < 1e-8);
    CHECK(rel_err(op.alpha_s * op.alpha_s *
                      (op.kappa_t * op.kappa_t + op.delta * op.delta),
                  p.drive.e_amp * p.drive.e_amp) < 1e-12);
    CHECK(rel_err(op.delta, 3e5 - 50.0 * op.q_s) < 1e-9);
  }

  // slope of the residual at each root against the closed forms
  const double hq = 1e-3;
  const double want_slope[] = {s1, -1.0, s3};
  for (int i = 0; i < 3; ++i) {
    const double slope = (steady_residual_fixed_laser(p, *disp, 1e8, ops[i].q_s + hq) -
                          steady_residual_fixed_laser(p, *disp, 1e8, ops[i].q_s - hq)) /
                         (2.0 * hq);
    CHECK(rel_err(slope, want_slope[i]) < 1e-6);
  }

  // at a laser frequency 1e15 the cancellation omega(z) - omega_l costs
  // several digits; the roots still come out to coarse tolerance
  SystemParams pb = bistable_system(8000.0, 1e15);
  auto dispb = make_dispersion(pb);
  std::vector<OperatingPoint> opsb = solve_fixed_laser(pb, *dispb, 1e15, 0.0, 10000.0);
  REQUIRE(opsb.size() == 3);
  CHECK(rel_err(opsb[0].q_s, r1) < 1e-5);
  CHECK(rel_err(opsb[1].q_s, r2) < 1e-5);
  CHECK(rel_err(opsb[2].q_s, r3) < 1e-5);
}

TEST_CASE("branch count collapses outside the bistable drive window") {
  for (double a : {1000.0, 5000.0}) {
    SystemParams p = bistable_system(a, 1e8);
    auto disp = make_dispersion(p);
    std::vector<OperatingPoint> ops = solve_fixed_laser(p, *disp, 1e8, 0.0, 20000.0);
    CHECK(ops.size() == 1);
    CHECK(ops[0].static_stable);
  }
  for (double a : {6500.0, 8000.0, 10000.0}) {
    SystemParams p = bistable_system(a, 1e8);
    auto disp = make_dispersion(p);
    CHECK(solve_fixed_laser(p, *disp, 1e8, 0.0, 20000.0).size() == 3);
  }
  {
    SystemParams p = bistable_system(12000.0, 1e8);
    auto disp = make_dispersion(p);
    std::vector<OperatingPoint> ops = solve_fixed_laser(p, *disp, 1e8, 0.0, 20000.0);
    CHECK(ops.size() == 1);
    CHECK(ops[0].static_stable);
  }
}

TEST_CASE("brute-force residual scan reproduces the branch finder") {
  SystemParams p = bistable_system(8000.0, 1e8);
  auto disp = make_dispersion(p);
  std::vector<OperatingPoint> ops = solve_fixed_laser(p, *disp, 1e8, 0.0, 10000.0);
  REQUIRE(ops.size() == 3);

  auto residual = [&](double q) { return steady_residual_fixed_laser(p, *disp, 1e8, q); };
  std::vector<double> roots;
  const int n = 100000;
  double prev = residual(0.0);
  for (int i = 1; i <= n; ++i) {
    const double q = 10000.0 * double(i) / n;
    const double r = residual(q);
    if ((prev < 0.0 && r >= 0.0) || (prev > 0.0 && r <= 0.0)) {
      roots.push_back(detail::brent_root(residual, q - 10000.0 / n, q, 1e-12));
    }
    prev = r;
  }
  REQUIRE(roots.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(rel_err(roots[i], ops[i].q_s) < 1e-10);
  }
}

TEST_CASE("steep quadratic pull leaves the contraction and is still solved") {
  // alpha^2 = 1e4 and d2omega_dz2 = +-300 make the balance-map slope -+3, so
  // plain iteration diverges and the bracketed fallback must take over
  SystemParams p = toy_system(1e14, 0.0, 1e8, -50.0, 300.0, 0.0);
  auto disp = make_dispersion(p);
  OperatingPoint op = solve_fixed_detuning(p, *disp);
  CHECK(rel_err(op.q_s, 0.125) < 1e-10);
  CHECK(op.static_stable);
  CHECK(rel_err(op.h, 3e6) < 1e-12);

  SystemParams pu = toy_system(1e14, 0.0, 1e8, -50.0, -300.0, 0.0);
  auto dispu = make_dispersion(pu);
  OperatingPoint opu = solve_fixed_detuning(pu, *dispu);
  CHECK(rel_err(opu.q_s, -0.25) < 1e-10);
  CHECK(!opu.static_stable);
}

TEST_CASE("slab operating points at the measured drive powers") {
  ConfigMap cm = default_config();
  cm.erase("target_g_over_omega_m");
  cm.erase("target_h_over_omega_m");
  apply_override(cm, "dispersion_mode=slab");
  apply_override(cm, "membrane_thickness_m=50e-9");
  apply_override(cm, "membrane_n_real=2.1");
  apply_override(cm, "membrane_n_imag=2e-6");
  apply_override(cm, "membrane_z0_m=10e-9");
  SystemParams p = build_params(cm);
  auto disp = make_dispersion(p);
  OperatingPoint op = solve_fixed_detuning(p, *disp);

  CHECK(rel_err(std::abs(op.g) / p.mech.omega_m, 0.010356) < 1e-4);
  CHECK(rel_err(op.q_s, 55.5978) < 1e-4);
  CHECK(rel_err(op.kappa_t, two_pi * 77e3) < 1e-9);
  CHECK(rel_err(op.gamma_abs, 0.0540854) < 1e-4);
  CHECK(rel_err(op.h / p.mech.omega_m, -5.642e-6) < 1e-3);
  CHECK(op.static_stable);
  CHECK(op.g > 0.0);  // negative frequency slope at +10 nm flips the sign

  apply_override(cm, "pump_power_w=1.6e-3");
  apply_override(cm, "membrane_z0_m=15e-9");
  SystemParams p2 = build_params(cm);
  auto disp2 = make_dispersion(p2);
  OperatingPoint op2 = solve_fixed_detuning(p2, *disp2);
  CHECK(rel_err(std::abs(op2.g) / p2.mech.omega_m, 0.023891) < 1e-4);
}

TEST_CASE("argument and geometry guards") {
  SystemParams p = bistable_system(8000.0, 1e8);
  auto disp = make_dispersion(p);
  CHECK(thrown_code([&] { solve_fixed_laser(p, *disp, 1e8, 1.0, 1.0); }) ==
        errc::bad_argument);
  CHECK(thrown_code([&] { solve_fixed_laser(p, *disp, 1e8, 0.0, 1.0, 4); }) ==
        errc::bad_argument);

  ConfigMap cm = default_config();
  cm.erase("target_g_over_omega_m");
  cm.erase("target_h_over_omega_m");
  apply_override(cm, "dispersion_mode=slab");
  apply_override(cm, "membrane_thickness_m=50e-9");
  apply_override(cm, "membrane_n_real=2.1");
  apply_override(cm, "membrane_n_imag=2e-6");
  SystemParams ps = build_params(cm);
  CHECK(thrown_code([&] { solve_mode(ps.cavity, ps.membrane, 0.047); }) ==
        errc::bad_argument);
}
