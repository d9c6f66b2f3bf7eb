#pragma once

// Three effective-temperature estimators for the cooled mode:
//  - area: stationary variance of q by spectral integration
//  - gamma: bath temperature scaled by gamma_m / gamma_eff
//  - peak: peak-height inversion assuming the damping-temperature product of
//    the bare mode is conserved
// All report the temperature a thermal state of the bare mode would need to
// show the same observable.

#include "optomech/spectra.hpp"

namespace optomech {

struct Variances {
  double q_var, p_var;  // zero-point units squared
};

// Spectral integrals of s_q and (omega/omega_m)^2 s_q over [0, Lambda] with
// Lambda = 50 max(omega_m, kappa_t, |delta|). The momentum integrand only
// falls off like 1/omega for the exact thermal form, so p_var is defined with
// this cutoff; at room temperature the truncation is far below the tolerance.
Variances stationary_variances(const OperatingPoint& op, const MechanicalParams& mech,
                               const BathParams& bath, double rel_tol = 1e-9);

double occupation_to_temperature(double n_eff, const MechanicalParams& mech,
                                 const BathParams& bath);

double t_area(double q_var, const MechanicalParams& mech, const BathParams& bath);

// gamma_eff evaluated at omega = omega_m (the standard evaluation point for
// damping-vs-detuning curves). Throws AntiDamped when gamma_eff <= 0.
double t_gamma(const OperatingPoint& op, const MechanicalParams& mech,
               const BathParams& bath);

// s_q_peak is the displacement spectrum at the response peak omega_peak.
// Throws NonPositivePeak on degenerate inputs.
double t_peak(double s_q_peak, double omega_peak, const MechanicalParams& mech,
              const BathParams& bath);

struct TemperatureReport {
  double t_area_k, t_gamma_k, t_peak_k;
  double n_eff;       // q_var - 1/2
  double q_var, p_var;
  double peak_omega;  // rad/s, self-consistent response peak
};

TemperatureReport thermometry_report(const OperatingPoint& op,
                                     const MechanicalParams& mech,
                                     const BathParams& bath);

}  // namespace optomech
