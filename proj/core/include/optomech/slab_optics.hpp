#pragma once

// Mode structure of a two-mirror cavity with a thin dielectric slab inside:
// exact resonance condition for perfect mirrors and a real index, perturbative
// treatment of the small absorptive index part, and the free-standing slab
// Fresnel amplitudes. Also the dispersion interface the rest of the library
// consumes, with a prescribed-coefficient implementation for direct mode.

#include <complex>
#include <functional>
#include <memory>

#include "optomech/params.hpp"

namespace optomech {

// Normal-incidence amplitude coefficients of a uniform slab in vacuum.
struct SlabAmplitudes {
  std::complex<double> r, t;
};
SlabAmplitudes slab_amplitudes(double k, std::complex<double> n, double thickness);
double slab_reflectivity(double k, std::complex<double> n, double thickness);  // |r|^2

// Resonance function: zero exactly when the vacuum wavenumber k is a mode of
// mirror | gap u | slab | gap v | mirror, with the membrane center at z0
// measured from the cavity midpoint. Smooth in both arguments.
double resonance_function(double k, const CavityParams& cav,
                          const MembraneParams& mem, double z0);

struct CavityMode {
  double k;       // 1/m
  double omega;   // rad/s
  double kappa1;  // rad/s, absorption-induced amplitude decay, 0 if n_imag == 0
};

// Mode nearest cav.omega_ref + branch * fsr at membrane position z0.
// Throws NoRootInBracket if the scan window contains no sign change and
// DegenerateCrossing if the root is (numerically) a double root.
CavityMode solve_mode(const CavityParams& cav, const MembraneParams& mem,
                      double z0, int branch = 0);

// Same decay rate from a full complex-wavenumber Newton solve; used to
// cross-check the perturbative kappa1.
double kappa1_exact(const CavityParams& cav, const MembraneParams& mem,
                    double z0, double k_start);

// Membrane position of the field node nearest z_near (local maximum of the
// mode frequency). Node spacing is half a wavelength; z_near must be within
// a quarter wavelength of the node sought.
double find_node(const CavityParams& cav, const MembraneParams& mem,
                 double z_near, int branch = 0);

// Frequency pull and absorption loss as functions of the membrane center
// position z. Implementations must be pure: equal z gives equal results.
class DispersionModel {
 public:
  virtual ~DispersionModel() = default;
  virtual double omega(double z) const = 0;        // rad/s, absolute
  virtual double domega_dz(double z) const = 0;    // rad/s / m
  virtual double d2omega_dz2(double z) const = 0;  // rad/s / m^2
  virtual double kappa1(double z) const = 0;       // rad/s
  virtual double dkappa1_dz(double z) const = 0;   // rad/s / m
};

std::unique_ptr<DispersionModel> make_dispersion(const SystemParams& p);

namespace detail {
// Scalar Brent root finder, exposed for tests. f(a) and f(b) must bracket.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double x_tol, int max_iter = 200);
}  // namespace detail

}  // namespace optomech
