#include "doctest.h"

#include <cmath>
#include <complex>

#include "optomech/config.hpp"
#include "optomech/constants.hpp"
#include "optomech/response.hpp"
#include "test_helpers.hpp"

using namespace optomech;
using omtest::rel_err;
using omtest::reference_point;
using omtest::response_point;
using omtest::thrown_code;

namespace {

double crel(std::complex<double> got, std::complex<double> want) {
  return std::abs(got - want) / std::abs(want);
}

MechanicalParams with_quality(MechanicalParams m, double q) {
  m.q_factor = q;
  m.gamma_m = m.omega_m / q;
  return m;
}

}  // namespace

TEST_CASE("uncoupled limit reduces to the bare oscillator") {
  const MechanicalParams mech = default_params().mech;
  const double om = mech.omega_m, gm = mech.gamma_m;
  OperatingPoint op = response_point(mech, 0.0, 1.0, two_pi * 77e3);

  for (double w : {0.1 * om, 0.9 * om, om, 2.7 * om}) {
    const std::complex<double> want =
        om / std::complex<double>(om * om - w * w, -w * gm);
    CHECK(crel(chi_eff(w, op, mech), want) < 1e-14);
    EffectiveDynamics ed = effective_dynamics(w, op, mech);
    CHECK(ed.gamma_eff == gm);
    CHECK(rel_err(ed.omega_eff, om) < 1e-14);
    CHECK(!ed.radicand_negative);
  }
  CHECK(rel_err(std::abs(chi_eff(0.0, op, mech)), 1.0 / om) < 1e-14);
  CHECK(rel_err(std::abs(chi_eff(om, op, mech)) * gm, 1.0) < 1e-14);
  CHECK(rel_err(self_consistent_peak(op, mech), om) < 1e-12);
  CHECK(full_stability(op, mech));
}

TEST_CASE("frozen effective dynamics at the cooling reference point") {
  const MechanicalParams mech = default_params().mech;
  OperatingPoint op = reference_point(mech);
  EffectiveDynamics ed = effective_dynamics(mech.omega_m, op, mech);

  CHECK(rel_err(ed.gamma_eff, 606.205887114) < 1e-9);
  CHECK(rel_err(ed.gamma_eff / mech.gamma_m, 6.493370508) < 1e-9);
  CHECK(rel_err(ed.gamma_eff - mech.gamma_m, 512.848225424) < 1e-9);
  CHECK(rel_err(ed.omega_eff, 2240567.3988) < 1e-9);
  CHECK(full_stability(op, mech));

  OperatingPoint oph = response_point(mech, -0.01, 0.5, two_pi * 77e3, 1e-5);
  CHECK(rel_err(effective_dynamics(mech.omega_m, oph, mech).gamma_eff, 164.38) < 5e-5);
}

TEST_CASE("coupling sign drops out without an absorption channel") {
  const MechanicalParams mech = default_params().mech;
  OperatingPoint a = response_point(mech, -0.013, 0.8, two_pi * 70e3, 2e-5);
  OperatingPoint b = a;
  b.g = -a.g;
  for (double w : {0.4 * mech.omega_m, mech.omega_m, 1.9 * mech.omega_m}) {
    EffectiveDynamics ea = effective_dynamics(w, a, mech);
    EffectiveDynamics eb = effective_dynamics(w, b, mech);
    CHECK(rel_err(ea.gamma_eff, eb.gamma_eff) < 1e-14);
    CHECK(rel_err(ea.omega_eff, eb.omega_eff) < 1e-14);
    CHECK(crel(chi_eff(w, a, mech), chi_eff(w, b, mech)) < 1e-14);
  }
}

TEST_CASE("optical damping is odd in the detuning") {
  const MechanicalParams mech = default_params().mech;
  for (double d : {0.3, 0.7, 1.0, 1.4}) {
    OperatingPoint red = response_point(mech, -0.01, d, two_pi * 77e3);
    OperatingPoint blue = response_point(mech, -0.01, -d, two_pi * 77e3);
    const double opt_red =
        effective_dynamics(mech.omega_m, red, mech).gamma_eff - mech.gamma_m;
    const double opt_blue =
        effective_dynamics(mech.omega_m, blue, mech).gamma_eff - mech.gamma_m;
    CHECK(rel_err(opt_blue, -opt_red) < 1e-12);
  }
}

TEST_CASE("blue detuning at the cooling coupling anti-damps") {
  const MechanicalParams mech = default_params().mech;
  OperatingPoint op = response_point(mech, -0.01, -1.0, two_pi * 77e3);
  EffectiveDynamics ed = effective_dynamics(mech.omega_m, op, mech);
  CHECK(ed.gamma_eff < 0.0);
  CHECK(rel_err(ed.gamma_eff, mech.gamma_m - 606.205887114 + mech.gamma_m) < 1e-9);
  CHECK(!full_stability(op, mech));
  CHECK(thrown_code([&] { self_consistent_peak(op, mech); }) == errc::anti_damped);
}

TEST_CASE("detuning of maximum damping, fixed coupling and fixed power") {
  const MechanicalParams mech = default_params().mech;
  const double om = mech.omega_m;
  const double kt = two_pi * 77e3;

  // fixed coupling: the optimum sits a hair above delta = omega_m
  auto ratio_g = [&](double d) {
    OperatingPoint op = response_point(mech, -0.01, d, kt);
    return effective_dynamics(om, op, mech).gamma_eff / mech.gamma_m;
  };
  // fixed input power: the intracavity amplitude, and with it the coupling,
  // falls off with detuning as the Lorentzian, pulling the optimum inward
  auto ratio_p = [&](double d) {
    const double scale = std::sqrt((kt * kt + om * om) / (kt * kt + d * d * om * om));
    OperatingPoint op = response_point(mech, -0.01 * scale, d, kt);
    return effective_dynamics(om, op, mech).gamma_eff / mech.gamma_m;
  };

  auto argmax = [](const std::function<double(double)>& f, double lo, double hi) {
    const int n = 2000;
    double best = lo, fb = f(lo);
    for (int i = 1; i <= n; ++i) {
      const double x = lo + (hi - lo) * double(i) / n;
      const double fx = f(x);
      if (fx > fb) { fb = fx; best = x; }
    }
    double a = best - (hi - lo) / n, b = best + (hi - lo) / n;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
      if (f1 < f2) {
        a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = f(x2);
      } else {
        b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = f(x1);
      }
    }
    return 0.5 * (a + b);
  };

  const double dg = argmax(ratio_g, 0.08, 1.7);
  CHECK(rel_err(dg, 1.000265407) < 1e-6);
  const double dp = argmax(ratio_p, 0.08, 1.7);
  CHECK(rel_err(dp, 0.952061353) < 1e-6);
  CHECK(rel_err(ratio_p(dp), 6.742622227) < 1e-9);
  // single-peaked: rises into the optimum, falls off on both sides
  CHECK(ratio_p(0.08) < 0.45 * ratio_p(dp));
  CHECK(ratio_p(1.7) < 0.75 * ratio_p(dp));
  CHECK(ratio_p(0.3) < ratio_p(0.6));
  CHECK(ratio_p(0.6) < ratio_p(dp));
  CHECK(ratio_p(dp) > ratio_p(1.2));
  CHECK(ratio_p(1.2) > ratio_p(1.5));
}

TEST_CASE("zero detuning leaves only the quadratic spring") {
  const MechanicalParams mech = default_params().mech;
  const double om = mech.omega_m;
  for (double h : {-1e-3, -1e-5, 0.0, 1e-5, 1e-3}) {
    OperatingPoint op = response_point(mech, 0.02, 0.0, two_pi * 77e3, h);
    for (double w : {0.5 * om, om}) {
      EffectiveDynamics ed = effective_dynamics(w, op, mech);
      CHECK(ed.gamma_eff == mech.gamma_m);
      CHECK(rel_err(ed.omega_eff, std::sqrt(om * om + h * om * om)) < 1e-14);
    }
    CHECK(rel_err(omega_tilde_sq(op, mech), om * om * (1.0 + h)) < 1e-14);
  }

  // frozen spring shift at h = 1e-3 omega_m, slightly below the h/2 estimate
  OperatingPoint op = response_point(mech, 0.02, 0.0, two_pi * 77e3, 1e-3);
  const double shift = effective_dynamics(om, op, mech).omega_eff - om;
  CHECK(rel_err(shift, 1120.012007) < 1e-9);
  CHECK(shift < 0.5 * 1e-3 * om);
  CHECK(rel_err(shift, 0.5 * 1e-3 * om) < 3e-4);
}

TEST_CASE("overcritical negative quadratic pull flags the lost resonance") {
  const MechanicalParams mech = default_params().mech;
  OperatingPoint op = response_point(mech, 0.01, 0.0, two_pi * 77e3, -1.01);
  EffectiveDynamics ed = effective_dynamics(mech.omega_m, op, mech);
  CHECK(ed.radicand_negative);
  CHECK(std::isnan(ed.omega_eff));
  CHECK(ed.gamma_eff == mech.gamma_m);
}

TEST_CASE("resolved-sideband damping approaches G^2 / 2 kappa") {
  const MechanicalParams mech = default_params().mech;
  const double om = mech.omega_m;
  const double kt = 1e-3 * om;
  const double g = 1e-4 * om;
  OperatingPoint op = response_point(mech, -1e-4, 1.0, kt);
  const double opt = effective_dynamics(om, op, mech).gamma_eff - mech.gamma_m;
  const double ratio = opt / (g * g / (2.0 * kt));
  CHECK(rel_err(ratio, 0.999999750) < 1e-9);
  CHECK(rel_err(ratio, 1.0 / (1.0 + kt * kt / (4.0 * om * om))) < 1e-12);
}

TEST_CASE("strong-coupling set reaches a damping ratio in the few hundreds") {
  MechanicalParams mech = with_quality(default_params().mech, 4e4);
  OperatingPoint op = response_point(mech, -0.031, 1.0, two_pi * 20e3);
  const double ratio = effective_dynamics(mech.omega_m, op, mech).gamma_eff / mech.gamma_m;
  CHECK(rel_err(ratio, 343.423) < 1e-5);
  CHECK(full_stability(op, mech));
}

TEST_CASE("susceptibility decomposes exactly into the effective pair") {
  const MechanicalParams mech = default_params().mech;
  const double om = mech.omega_m;
  OperatingPoint ops[] = {
      reference_point(mech),
      response_point(mech, -0.012, 0.7, two_pi * 70e3, 2e-5, 0.3 * 0.012 * om,
                     0.1 * two_pi * 70e3),
  };
  for (const OperatingPoint& op : ops) {
    for (double w : {0.3 * om, 0.9 * om, om, 1.37 * om, 2.9 * om}) {
      EffectiveDynamics ed = effective_dynamics(w, op, mech);
      const std::complex<double> want =
          om / std::complex<double>(ed.omega_eff * ed.omega_eff - w * w,
                                    -w * ed.gamma_eff);
      CHECK(crel(chi_eff(w, op, mech), want) < 5e-12);
    }
  }
}

TEST_CASE("self-consistent peak is a fixed point carrying the peak identity") {
  const MechanicalParams mech = default_params().mech;
  OperatingPoint op = reference_point(mech);
  const double wp = self_consistent_peak(op, mech);
  EffectiveDynamics ed = effective_dynamics(wp, op, mech);
  CHECK(rel_err(ed.omega_eff, wp) < 1e-12);
  CHECK(rel_err(std::abs(chi_eff(wp, op, mech)),
                mech.omega_m / (wp * ed.gamma_eff)) < 1e-9);
  // matches the frozen drift-matrix eigenfrequency to the gamma^2 level
  CHECK(rel_err(wp, 2240567.40366008) < 5e-8);
}

TEST_CASE("eigenvalue stability agrees with the damping sign when clear-cut") {
  const MechanicalParams mech = default_params().mech;
  for (double d : {-1.0, -0.7}) {
    OperatingPoint op = response_point(mech, -0.01, d, two_pi * 77e3);
    CHECK(effective_dynamics(mech.omega_m, op, mech).gamma_eff < -0.2 * mech.gamma_m);
    CHECK(!full_stability(op, mech));
  }
  for (double d : {0.3, 0.7, 1.0, 1.5}) {
    OperatingPoint op = response_point(mech, -0.01, d, two_pi * 77e3);
    CHECK(effective_dynamics(mech.omega_m, op, mech).gamma_eff > mech.gamma_m);
    CHECK(full_stability(op, mech));
  }
  // far blue the anti-damping has decayed again: damped despite the detuning
  OperatingPoint far = response_point(mech, -0.01, -1.5, two_pi * 77e3);
  CHECK(effective_dynamics(mech.omega_m, far, mech).gamma_eff > 0.0);
  CHECK(full_stability(far, mech));
}
