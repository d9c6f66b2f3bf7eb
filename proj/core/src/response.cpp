#include "optomech/response.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "optomech/errors.hpp"

namespace optomech {

double omega_tilde_sq(const OperatingPoint& op, const MechanicalParams& mech) {
  return mech.omega_m * mech.omega_m + op.h * mech.omega_m;
}

std::complex<double> chi_eff(double omega, const OperatingPoint& op,
                             const MechanicalParams& mech) {
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> kmi = op.kappa_t - i * omega;
  const std::complex<double> cav = kmi * kmi + op.delta * op.delta;
  const std::complex<double> back_action =
      op.g * mech.omega_m * (op.g * op.delta - op.gamma_abs * kmi) / cav;
  const std::complex<double> denom =
      omega_tilde_sq(op, mech) - omega * omega - i * omega * mech.gamma_m - back_action;
  return mech.omega_m / denom;
}

EffectiveDynamics effective_dynamics(double omega, const OperatingPoint& op,
                                     const MechanicalParams& mech) {
  const double k2 = op.kappa_t * op.kappa_t;
  const double w2 = omega * omega;
  const double d2 = op.delta * op.delta;
  const double dm = omega - op.delta;
  const double dp = omega + op.delta;
  const double dhat = (k2 + dm * dm) * (k2 + dp * dp);
  const double gom = op.g * mech.omega_m;

  EffectiveDynamics out;
  const double omega_eff_sq =
      omega_tilde_sq(op, mech) -
      gom * (op.g * op.delta * (k2 - w2 + d2) -
             op.gamma_abs * op.kappa_t * (k2 + w2 + d2)) / dhat;
  out.radicand_negative = omega_eff_sq < 0.0;
  out.omega_eff = out.radicand_negative ? std::nan("") : std::sqrt(omega_eff_sq);
  out.gamma_eff =
      mech.gamma_m +
      gom * (2.0 * op.g * op.delta * op.kappa_t -
             op.gamma_abs * (k2 + w2 - d2)) / dhat;
  return out;
}

double self_consistent_peak(const OperatingPoint& op, const MechanicalParams& mech) {
  double omega = mech.omega_m;
  for (int it = 0; it < 200; ++it) {
    const EffectiveDynamics d = effective_dynamics(omega, op, mech);
    if (d.radicand_negative)
      fail(errc::anti_damped, "effective resonance collapsed (negative radicand)");
    const double next = 0.5 * (omega + d.omega_eff);  // relaxed fixed point
    if (std::abs(next - omega) <= 1e-13 * next) {
      omega = next;
      break;
    }
    omega = next;
  }
  const EffectiveDynamics d = effective_dynamics(omega, op, mech);
  if (!(d.gamma_eff > 0.0))
    fail(errc::anti_damped, "no damped resonance at the response peak");
  return omega;
}

bool full_stability(const OperatingPoint& op, const MechanicalParams& mech) {
  // quadratures (q, p, X, Y) with the optical phase chosen so alpha_s is real
  Eigen::Matrix4d a;
  a << 0.0, mech.omega_m, 0.0, 0.0,
      -(mech.omega_m + op.h), -mech.gamma_m, op.g, 0.0,
      -op.gamma_abs, 0.0, -op.kappa_t, op.delta,
      op.g, 0.0, -op.delta, -op.kappa_t;
  const Eigen::Vector4cd ev = a.eigenvalues();
  const double margin = 1e-12 * (mech.omega_m + op.kappa_t + std::abs(op.delta));
  for (int i = 0; i < 4; ++i)
    if (ev[i].real() >= -margin) return false;
  return true;
}

}  // namespace optomech
