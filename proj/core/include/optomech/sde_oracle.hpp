#pragma once

// Stochastic time-domain reference integrator for the linearized model and a
// nonlinear splitting variant used to validate the linearization itself.
//
// State basis (q, p, X, Y): mechanical quadratures in zero-point units and
// cavity quadratures in the frame where the steady field is real. The linear
// step is exact: x <- Phi x + L z with Phi = exp(A dt) and L L^T the exact
// step-noise covariance (Van Loan construction), so the only statistical error
// is sampling, never discretization.
//
// Noise model is classical: the thermal force has flat density 2 gamma_m
// (n_th + 1/2); when the absorption channel is present (gamma_abs != 0) its
// port keeps vacuum-strength quadrature noise kappa1 plus the correlated flat
// force term gamma_abs^2/(4 kappa1), cross p-Y gamma_abs/2. Pure radiation
// pressure vacuum noise through the other ports is dropped; here it sits three
// orders of magnitude below the thermal force. The analytic spectra keep it,
// and comparison tolerances absorb the difference.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "optomech/params.hpp"
#include "optomech/slab_optics.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

enum class SimMode { linear, nonlinear };

struct SimConfig {
  double duration = 1.0;   // simulated seconds per trajectory
  double dt = 0.0;         // 0 selects the guard value 0.05 / max rate
  int trajectories = 1;
  uint64_t seed = 1;
  int record_stride = 1;   // pass every record_stride-th sample to the sink
  SimMode mode = SimMode::linear;
  bool noise = true;
  bool stationary_init = true;        // draw x0 from the stationary Gaussian
  bool use_init = false;              // start from init instead (ringdowns)
  std::array<double, 4> init{};       // deviation coordinates (q, p, X, Y)
};

struct SimSummary {
  double dt = 0.0;
  uint64_t steps_per_traj = 0;
  uint64_t records_per_traj = 0;
  int trajectories = 0;
  double q_mean = 0.0;      // pooled mean of the recorded deviation
  double q_var = 0.0;       // mean of the per-trajectory variances
  double q_var_sem = 0.0;   // spread of those variances / sqrt(n_traj)
  std::vector<double> q_var_per_traj;
};

// Row-major 4x4 drift A and diffusion D of the linearized model,
// dx = A x dt + dW with <dW dW^T> = D dt.
std::array<double, 16> drift_matrix(const OperatingPoint& op, const MechanicalParams& mech);
std::array<double, 16> diffusion_matrix(const OperatingPoint& op, const MechanicalParams& mech,
                                        const BathParams& bath);

// Exact one-step update x <- phi x + noise_l z, z iid standard normal.
// noise_l maps the p kick to z[0] so that runs in both modes driven by the
// same stream stay pathwise comparable.
struct Propagator {
  std::array<double, 16> phi{};
  std::array<double, 16> noise_l{};
  double dt = 0.0;
};
Propagator make_propagator(const OperatingPoint& op, const MechanicalParams& mech,
                           const BathParams& bath, double dt);

// Stationary covariance of the linear model (continuous Lyapunov equation).
std::array<double, 16> stationary_covariance(const OperatingPoint& op,
                                             const MechanicalParams& mech,
                                             const BathParams& bath);

// Fastest rate in the problem; steps must satisfy dt <= 0.05 / max_rate.
double max_rate(const OperatingPoint& op, const MechanicalParams& mech);

// Runs the simulation. The sink, when set, receives (trajectory index, q
// deviation from the operating point) once per recorded sample. Nonlinear mode
// needs the dispersion model and rejects systems with a significant absorption
// coupling, which it does not model.
using RecordSink = std::function<void(int, double)>;
SimSummary integrate(const SystemParams& p, const OperatingPoint& op, const SimConfig& cfg,
                     const RecordSink& sink = {}, const DispersionModel* disp = nullptr);

}  // namespace optomech
