#pragma once

// Validated system parameters. Everything downstream consumes SystemParams;
// nothing downstream re-validates. Angular rates internally; config keys that
// end in _hz are ordinary frequencies and are converted on construction.

#include <cstdint>
#include <string>

namespace optomech {

struct MechanicalParams {
  double omega_m;   // rad/s
  double gamma_m;   // rad/s, energy decay rate (FWHM of the bare line)
  double q_factor;  // omega_m / gamma_m
  double mass;      // kg
  double overlap;   // transverse mode overlap Theta, in (0, 1]
  double x_zpf;     // sqrt(hbar / (m omega_m)), m
};

struct CavityParams {
  double length;        // m, mirror-to-mirror
  double finesse;       // empty cavity
  double kappa0;        // rad/s, input mirror amplitude decay
  double kappa2;        // rad/s, end mirror amplitude decay
  double kappa_excess;  // rad/s, lumped additional loss, >= 0
  double omega_ref;     // rad/s, empty-cavity longitudinal mode nearest the drive
  double fsr;           // rad/s, pi c / L
};

struct MembraneParams {
  double thickness;  // m
  double n_real;     // refractive index, real part
  double n_imag;     // >= 0
  double z0;         // m, membrane center, 0 = cavity midpoint
};

struct DriveParams {
  double power;          // W at the input mirror
  double wavelength;     // m
  double omega_l;        // rad/s, 2 pi c / wavelength
  double detuning;       // rad/s, effective detuning omega(q_s) - omega_l
  double e_amp;          // sqrt(2 P kappa0 / (hbar omega_l)), photon-flux amplitude
  double probe_power;    // W
  double probe_kappa;    // rad/s, input coupling seen by the probe
  double probe_overlap;  // Theta of the probe beam
};

struct BathParams {
  double temperature;       // K
  double n_thermal;         // occupation of the bath at omega_m
  bool quantum_occupation;  // Bose-Einstein instead of k_B T / (hbar omega_m)
};

enum class DispersionKind { direct, slab };

// Direct mode: prescribed low-order expansion of the mode pull around the
// membrane rest position z_ref = membrane.z0.
struct DirectDispersionParams {
  double delta0;       // rad/s, omega(z_ref) - omega_l at q = 0
  double domega_dz;    // rad/s / m
  double d2omega_dz2;  // rad/s / m^2
  double kappa1;       // rad/s at z_ref
  double dkappa1_dz;   // rad/s / m
};

enum class SolveMode { detuning, laser };

struct SystemParams {
  MechanicalParams mech;
  CavityParams cavity;
  MembraneParams membrane;
  DriveParams drive;
  BathParams bath;
  DispersionKind dispersion;
  DirectDispersionParams direct;  // meaningful when dispersion == direct
  SolveMode solve_mode;
  double shot_floor;  // m / sqrt(Hz) displacement-equivalent detection floor, 0 = vacuum probe noise
};

// Derived helpers.
double thermal_occupation(double omega_m, double temperature, bool quantum);
double zero_point_amplitude(double mass, double omega_m);  // m
double sql_peak_displacement_psd(const MechanicalParams& m);  // m^2 s, one-sided at resonance

}  // namespace optomech
