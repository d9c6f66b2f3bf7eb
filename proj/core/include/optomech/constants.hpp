#pragma once

// Physical constants (SI, 2019 exact values) and conventions used throughout.
//
// Conventions:
//  - all frequencies and rates are angular (rad/s) unless a name says _hz
//  - kappa refers to amplitude decay rates; the cavity intensity decay is 2*kappa_T
//  - mechanical displacement q is in zero-point units, x = x_zpf * q
//  - spectral densities are two-sided in angular frequency, normalized so that
//    Var[q] = integral S_q(omega) d omega / (2 pi)

namespace optomech {

inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double k_boltzmann = 1.380649e-23;    // J / K
inline constexpr double c_light = 2.99792458e8;        // m / s

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace optomech
