#pragma once

// Adaptive Gauss-Kronrod 15(7) integration on a finite interval, bisecting the
// interval with the worst error estimate. Built for the smooth, sharply peaked
// integrands of this library (Lorentzian-like spectra); not a general-purpose
// replacement for a quadrature package.

#include <functional>

namespace optomech {

struct QuadResult {
  double value;
  double abs_error;  // conservative estimate, sum of |K15 - G7| per interval
  int intervals;
};

// Throws Error(integration_not_converged) if the error target
// max(abs_tol, rel_tol * |integral|) is not met within max_intervals.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-9, double abs_tol = 0.0,
                     int max_intervals = 4000);

}  // namespace optomech
