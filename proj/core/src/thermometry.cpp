#include "optomech/thermometry.hpp"

#include <algorithm>
#include <cmath>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/quadrature.hpp"

namespace optomech {

Variances stationary_variances(const OperatingPoint& op, const MechanicalParams& mech,
                               const BathParams& bath, double rel_tol) {
  double peak = mech.omega_m;
  double width = mech.gamma_m;
  try {
    peak = self_consistent_peak(op, mech);
    width = std::max(effective_dynamics(peak, op, mech).gamma_eff, 1e-9 * peak);
  } catch (const Error&) {
    // fall back to the bare window; the integrals themselves stay exact
  }
  const double lambda =
      50.0 * std::max({mech.omega_m, op.kappa_t, std::abs(op.delta)});

  // seed panel edges around the resonance so the adaptive pass starts sharp
  double edges[6] = {0.0,
                     std::max(0.0, 0.5 * peak),
                     std::max(0.0, peak - 20.0 * width),
                     peak + 20.0 * width,
                     std::min(3.0 * peak, lambda),
                     lambda};
  for (int i = 1; i < 6; ++i) edges[i] = std::max(edges[i], edges[i - 1]);

  auto integrate_density = [&](auto&& weight) {
    double total = 0.0;
    for (int i = 0; i + 1 < 6; ++i) {
      if (!(edges[i + 1] > edges[i])) continue;
      total += integrate(
                   [&](double w) { return weight(w) * s_q(w, op, mech, bath); },
                   edges[i], edges[i + 1], rel_tol,
                   0.0, 4000)
                   .value;
    }
    return total / pi;  // two-sided, even integrand: (1/2pi) * 2 * int_0^inf
  };

  Variances v;
  v.q_var = integrate_density([](double) { return 1.0; });
  const double om2 = mech.omega_m * mech.omega_m;
  v.p_var = integrate_density([om2](double w) { return w * w / om2; });
  return v;
}

double occupation_to_temperature(double n_eff, const MechanicalParams& mech,
                                 const BathParams& bath) {
  if (!(n_eff > 0.0))
    fail(errc::non_positive_peak, "occupation must be positive to invert");
  if (!bath.quantum_occupation)
    return hbar * mech.omega_m * n_eff / k_boltzmann;
  return hbar * mech.omega_m / (k_boltzmann * std::log1p(1.0 / n_eff));
}

double t_area(double q_var, const MechanicalParams& mech, const BathParams& bath) {
  return occupation_to_temperature(q_var - 0.5, mech, bath);
}

double t_gamma(const OperatingPoint& op, const MechanicalParams& mech,
               const BathParams& bath) {
  const EffectiveDynamics d = effective_dynamics(mech.omega_m, op, mech);
  if (!(d.gamma_eff > 0.0))
    fail(errc::anti_damped, "t_gamma undefined for anti-damped response");
  return bath.temperature * mech.gamma_m / d.gamma_eff;
}

double t_peak(double s_q_peak, double omega_peak, const MechanicalParams& mech,
              const BathParams& bath) {
  if (!(s_q_peak > 0.0) || !(omega_peak > 0.0))
    fail(errc::non_positive_peak, "peak inversion needs positive peak data");
  const double arg = s_q_peak * hbar * mech.gamma_m * omega_peak * omega_peak *
                     bath.temperature / (2.0 * k_boltzmann * mech.omega_m);
  return std::sqrt(arg);
}

TemperatureReport thermometry_report(const OperatingPoint& op,
                                     const MechanicalParams& mech,
                                     const BathParams& bath) {
  TemperatureReport rep{};
  const Variances v = stationary_variances(op, mech, bath);
  rep.q_var = v.q_var;
  rep.p_var = v.p_var;
  rep.n_eff = v.q_var - 0.5;
  rep.t_area_k = t_area(v.q_var, mech, bath);
  rep.t_gamma_k = t_gamma(op, mech, bath);
  rep.peak_omega = self_consistent_peak(op, mech);
  rep.t_peak_k = t_peak(s_q(rep.peak_omega, op, mech, bath), rep.peak_omega,
                        mech, bath);
  return rep;
}

}  // namespace optomech
