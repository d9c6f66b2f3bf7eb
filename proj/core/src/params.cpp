#include "optomech/params.hpp"

#include <cmath>

#include "optomech/constants.hpp"

namespace optomech {

double thermal_occupation(double omega_m, double temperature, bool quantum) {
  const double x = hbar * omega_m / (k_boltzmann * temperature);
  if (!quantum) return 1.0 / x;
  return 1.0 / std::expm1(x);
}

double zero_point_amplitude(double mass, double omega_m) {
  return std::sqrt(hbar / (mass * omega_m));
}

double sql_peak_displacement_psd(const MechanicalParams& m) {
  return 2.0 * hbar * m.q_factor / (m.mass * m.omega_m * m.omega_m);
}

}  // namespace optomech
