#include "optomech/steady_state.hpp"

#include <cmath>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace {

double kappa_total(const SystemParams& p, const DispersionModel& disp, double z) {
  return p.cavity.kappa0 + p.cavity.kappa2 + p.cavity.kappa_excess + disp.kappa1(z);
}

OperatingPoint finish_point(const SystemParams& p, const DispersionModel& disp,
                            double q_s, double delta, double alpha_sq,
                            double slope_sign) {
  OperatingPoint op{};
  const double zpf = p.mech.x_zpf * p.mech.overlap;
  op.q_s = q_s;
  op.z_s = p.membrane.z0 + zpf * q_s;
  op.delta = delta;
  op.kappa1 = disp.kappa1(op.z_s);
  op.kappa_t = p.cavity.kappa0 + p.cavity.kappa2 + p.cavity.kappa_excess + op.kappa1;
  op.alpha_s = std::sqrt(alpha_sq);
  const double domega_dq = disp.domega_dz(op.z_s) * zpf;
  const double dkappa1_dq = disp.dkappa1_dz(op.z_s) * zpf;
  op.g = -std::sqrt(2.0) * domega_dq * op.alpha_s;
  op.gamma_abs = std::sqrt(2.0) * dkappa1_dq * op.alpha_s;
  op.h = disp.d2omega_dz2(op.z_s) * zpf * zpf * alpha_sq;
  op.static_stable = slope_sign > 0.0;
  if (p.drive.probe_power > 0.0) {
    op.g_probe = -2.0 * disp.domega_dz(op.z_s) * p.drive.probe_overlap *
                 std::sqrt(p.drive.probe_power * p.drive.probe_kappa /
                           (p.mech.mass * p.mech.omega_m * p.drive.omega_l *
                            op.kappa_t * op.kappa_t));
  } else {
    op.g_probe = 0.0;
  }
  return op;
}

}  // namespace

OperatingPoint solve_fixed_detuning(const SystemParams& p, const DispersionModel& disp) {
  const double E2 = p.drive.e_amp * p.drive.e_amp;
  const double delta = p.drive.detuning;
  const double zpf = p.mech.x_zpf * p.mech.overlap;

  auto alpha_sq_at = [&](double q) {
    const double kt = kappa_total(p, disp, p.membrane.z0 + zpf * q);
    return E2 / (kt * kt + delta * delta);
  };
  auto pull = [&](double q) {  // radiation-pressure displacement the balance must match
    const double z = p.membrane.z0 + zpf * q;
    return -disp.domega_dz(z) * zpf * alpha_sq_at(q) / p.mech.omega_m;
  };

  // weak-coupling fixed point; the contraction rate is |h|/omega_m << 1
  double q = 0.0;
  bool converged = false;
  for (int it = 0; it < 60; ++it) {
    const double q_next = pull(q);
    if (std::abs(q_next - q) <= 1e-14 * std::max(1.0, std::abs(q_next))) {
      q = q_next;
      converged = true;
      break;
    }
    q = q_next;
  }
  if (!converged) {
    // strong quadratic pull: fall back to a bracketed solve of the residual
    auto residual = [&](double qq) { return qq - pull(qq); };
    const double span = 10.0 + 2.0 * std::abs(q);
    double lo = q - span, hi = q + span;
    int doublings = 0;
    while (residual(lo) * residual(hi) > 0.0) {
      lo -= span;
      hi += span;
      if (++doublings > 40)
        fail(errc::no_convergence, "static balance: no bracket for the fixed-detuning root");
    }
    q = detail::brent_root(residual, lo, hi, 1e-14);
  }

  // static stability from the slope of the balance map
  const double hq = 1e-6 * std::max(1.0, std::abs(q));
  const double slope = 1.0 - (pull(q + hq) - pull(q - hq)) / (2.0 * hq);
  return finish_point(p, disp, q, delta, alpha_sq_at(q), slope);
}

double steady_residual_fixed_laser(const SystemParams& p, const DispersionModel& disp,
                                   double omega_l, double q) {
  const double E2 = p.drive.e_amp * p.drive.e_amp;
  const double zpf = p.mech.x_zpf * p.mech.overlap;
  const double z = p.membrane.z0 + zpf * q;
  const double kt = kappa_total(p, disp, z);
  const double delta = disp.omega(z) - omega_l;
  const double alpha_sq = E2 / (kt * kt + delta * delta);
  return q + disp.domega_dz(z) * zpf * alpha_sq / p.mech.omega_m;
}

std::vector<OperatingPoint> solve_fixed_laser(const SystemParams& p,
                                              const DispersionModel& disp,
                                              double omega_l, double q_min,
                                              double q_max, int n_scan) {
  if (!(q_max > q_min) || n_scan < 8)
    fail(errc::bad_argument, "solve_fixed_laser needs q_min < q_max and n_scan >= 8");
  const double zpf = p.mech.x_zpf * p.mech.overlap;

  auto residual = [&](double q) {
    return steady_residual_fixed_laser(p, disp, omega_l, q);
  };

  std::vector<OperatingPoint> out;
  double prev_q = q_min, prev_r = residual(q_min);
  for (int i = 1; i <= n_scan; ++i) {
    const double q = q_min + (q_max - q_min) * double(i) / n_scan;
    const double r = residual(q);
    if ((prev_r < 0.0 && r >= 0.0) || (prev_r > 0.0 && r <= 0.0)) {
      const double q_root = detail::brent_root(residual, prev_q, q, 1e-13);
      const double hq = 1e-7 * (q_max - q_min);
      const double slope = (residual(q_root + hq) - residual(q_root - hq)) / (2.0 * hq);
      const double z = p.membrane.z0 + zpf * q_root;
      const double kt = kappa_total(p, disp, z);
      const double delta = disp.omega(z) - omega_l;
      const double alpha_sq =
          p.drive.e_amp * p.drive.e_amp / (kt * kt + delta * delta);
      out.push_back(finish_point(p, disp, q_root, delta, alpha_sq, slope));
    }
    prev_q = q;
    prev_r = r;
  }
  return out;
}

}  // namespace optomech
