#pragma once

// Lorentzian line fitting for the closed analysis loop: synthesize a finitely
// averaged noisy spectrum, fit a five-parameter line model
//   S(w) = floor + slope (w - center) + height (fwhm/2)^2 / ((w-center)^2 + (fwhm/2)^2)
// by Levenberg-Marquardt with analytic derivatives, and report parameter
// uncertainties from the fit covariance.

#include <array>
#include <cstdint>
#include <vector>

namespace optomech {

struct FitResult {
  double center, fwhm, height, floor, floor_slope;
  double center_err, fwhm_err, height_err;   // 1 sigma
  std::array<double, 25> covariance;         // row major, order as above
  double residual_rms;                       // weighted, ~1 for a correct model
  int iterations;
};

// Multiplies each bin of the true spectrum by an independent Gamma(m, 1/m)
// factor: the distribution of an m-segment averaged periodogram estimate.
std::vector<double> synth_spectrum(const std::vector<double>& s_true,
                                   int snapshots, uint64_t seed);

// Fits the model to (omega, psd) with per-bin sigma = psd / sqrt(snapshots).
// Throws NoPeakFound when no line rises above the noise of the floor and
// FitDiverged when the iteration fails to converge.
FitResult fit_lorentzian(const std::vector<double>& omega,
                         const std::vector<double>& psd, int snapshots);

}  // namespace optomech
