#pragma once

// Displacement noise spectra around an operating point. All densities are
// two-sided in angular frequency: Var[q] = integral S_q domega / (2 pi). The
// CSV layer converts to one-sided per-Hz densities (factor 4 pi) for plotting.

#include <vector>

#include "optomech/response.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

struct SpectrumParts {
  double s_th;   // thermal force noise seen by q
  double s_rp;   // radiation-pressure back-action
  double s_abs;  // membrane-absorption force noise
};

// Force-noise parts before filtering by |chi_eff|^2. Throws
// DivisionByZeroKappa1 when gamma_abs != 0 with kappa1 == 0.
SpectrumParts noise_parts(double omega, const OperatingPoint& op,
                          const MechanicalParams& mech, const BathParams& bath);

// Displacement spectrum in zero-point units: |chi_eff|^2 * (sum of parts).
double s_q(double omega, const OperatingPoint& op, const MechanicalParams& mech,
           const BathParams& bath);

// Detection floor referred to displacement, m^2 s, two-sided angular. Shape is
// (kappa_T^2 + omega^2): cavity filtering of a flat optical shot background.
// With shot_floor > 0 the level is pinned so the one-sided floor at omega_m is
// shot_floor^2; otherwise a vacuum-noise probe with coupling g_probe sets it,
// and with no probe at all the floor is zero (ideal detection).
double detection_floor(double omega, const OperatingPoint& op, const SystemParams& p);

// x_zpf^2 * s_q + detection_floor, m^2 s.
double s_x_detected(double omega, const OperatingPoint& op, const SystemParams& p);

// Frequency grid for spectrum output: dense linear window around the response
// peak, logarithmic wings. Strictly increasing, all entries > 0.
std::vector<double> resonance_grid(const OperatingPoint& op,
                                   const MechanicalParams& mech,
                                   int n_dense = 2400, int n_wing = 300);

}  // namespace optomech
