#pragma once

// Classical steady state of the driven cavity + membrane. Two solving
// conventions:
//  - fixed effective detuning (the sweep convention): the commanded detuning
//    Delta = omega(q_s) - omega_l is held and the laser frequency is implicit
//  - fixed laser frequency: all self-consistent branches, including the
//    bistable ones, found by a bracketing scan in q

#include <vector>

#include "optomech/params.hpp"
#include "optomech/slab_optics.hpp"

namespace optomech {

struct OperatingPoint {
  double q_s;        // zero-point units
  double z_s;        // m, membrane center displaced by the static shift
  double alpha_s;    // sqrt(intracavity photons), real >= 0
  double delta;      // rad/s, omega(q_s) - omega_l
  double kappa_t;    // rad/s, total amplitude decay at q_s
  double kappa1;     // rad/s, membrane absorption channel at q_s
  double g;          // rad/s, signed linearized optomechanical coupling
  double g_probe;    // rad/s, probe-beam coupling (0 without probe power)
  double h;          // rad/s, quadratic frequency-pull term
  double gamma_abs;  // rad/s, absorption force coupling Gamma
  bool static_stable;  // slope criterion of the scalar steady-state map
};

OperatingPoint solve_fixed_detuning(const SystemParams& p, const DispersionModel& disp);

std::vector<OperatingPoint> solve_fixed_laser(const SystemParams& p,
                                              const DispersionModel& disp,
                                              double omega_l, double q_min,
                                              double q_max, int n_scan = 2048);

// Residual of the static balance at q (zero at a steady state); exposed for
// tests and for brute-force cross-checks of the branch finder.
double steady_residual_fixed_laser(const SystemParams& p, const DispersionModel& disp,
                                   double omega_l, double q);

}  // namespace optomech
