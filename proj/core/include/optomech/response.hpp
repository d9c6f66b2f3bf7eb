#pragma once

// Back-action-modified mechanical response around an operating point: the
// effective susceptibility and the frequency-dependent effective resonance
// frequency and damping, plus the full linear stability check.

#include <complex>

#include "optomech/steady_state.hpp"

namespace optomech {

struct EffectiveDynamics {
  double omega_eff;   // rad/s; NaN when radicand_negative
  double gamma_eff;   // rad/s; negative = anti-damped (flagged, not thrown)
  bool radicand_negative;
};

// Quadratic-pull-shifted bare frequency squared: omega_m^2 + h * omega_m.
double omega_tilde_sq(const OperatingPoint& op, const MechanicalParams& mech);

// Effective mechanical susceptibility in zero-point units. The bare limit is
// chi(omega) = omega_m / (omega_m^2 - omega^2 - i omega gamma_m).
std::complex<double> chi_eff(double omega, const OperatingPoint& op,
                             const MechanicalParams& mech);

EffectiveDynamics effective_dynamics(double omega, const OperatingPoint& op,
                                     const MechanicalParams& mech);

// Fixed point omega = omega_eff(omega), the observed resonance peak.
// Throws AntiDamped if no damped peak exists there.
double self_consistent_peak(const OperatingPoint& op, const MechanicalParams& mech);

// True when every eigenvalue of the linearized drift has a negative real part.
bool full_stability(const OperatingPoint& op, const MechanicalParams& mech);

}  // namespace optomech
