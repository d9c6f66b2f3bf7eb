#include "optomech/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

SpectrumParts noise_parts(double omega, const OperatingPoint& op,
                          const MechanicalParams& mech, const BathParams& bath) {
  SpectrumParts parts{};

  if (bath.quantum_occupation) {
    // exact thermal force spectrum; reduces to the flat form for
    // k_B T >> hbar omega
    const double x = hbar * omega / (2.0 * k_boltzmann * bath.temperature);
    parts.s_th = (omega == 0.0)
                     ? 2.0 * mech.gamma_m * k_boltzmann * bath.temperature /
                           (hbar * mech.omega_m)
                     : mech.gamma_m * (omega / mech.omega_m) / std::tanh(x);
  } else {
    parts.s_th = 2.0 * mech.gamma_m * (bath.n_thermal + 0.5);
  }

  const double k2 = op.kappa_t * op.kappa_t;
  const double w2 = omega * omega;
  const double d2 = op.delta * op.delta;
  const double dm = omega - op.delta;
  const double dp = omega + op.delta;
  const double dhat = (k2 + dm * dm) * (k2 + dp * dp);

  parts.s_rp = op.g * op.g * op.kappa_t * (d2 + k2 + w2) / dhat;

  if (op.gamma_abs != 0.0) {
    if (op.kappa1 <= 0.0)
      fail(errc::division_by_zero_kappa1,
           "absorption force noise needs kappa1 > 0 when gamma_abs != 0");
    parts.s_abs = op.gamma_abs * op.gamma_abs / (4.0 * op.kappa1) +
                  op.gamma_abs * op.g * op.delta * (d2 + k2 - w2) / dhat;
  } else {
    parts.s_abs = 0.0;
  }
  return parts;
}

double s_q(double omega, const OperatingPoint& op, const MechanicalParams& mech,
           const BathParams& bath) {
  const SpectrumParts parts = noise_parts(omega, op, mech, bath);
  return std::norm(chi_eff(omega, op, mech)) *
         (parts.s_th + parts.s_rp + parts.s_abs);
}

double detection_floor(double omega, const OperatingPoint& op, const SystemParams& p) {
  const double shape = op.kappa_t * op.kappa_t + omega * omega;
  if (p.shot_floor > 0.0) {
    const double ref = op.kappa_t * op.kappa_t + p.mech.omega_m * p.mech.omega_m;
    return p.shot_floor * p.shot_floor / (4.0 * pi) * shape / ref;
  }
  if (op.g_probe != 0.0) {
    const double x2 = p.mech.x_zpf * p.mech.x_zpf;
    return x2 * shape * 0.5 / (op.g_probe * op.g_probe);
  }
  return 0.0;
}

double s_x_detected(double omega, const OperatingPoint& op, const SystemParams& p) {
  return p.mech.x_zpf * p.mech.x_zpf * s_q(omega, op, p.mech, p.bath) +
         detection_floor(omega, op, p);
}

std::vector<double> resonance_grid(const OperatingPoint& op,
                                   const MechanicalParams& mech, int n_dense,
                                   int n_wing) {
  if (n_dense < 16 || n_wing < 8)
    fail(errc::bad_argument, "resonance_grid needs n_dense >= 16, n_wing >= 8");
  double peak;
  double width;
  try {
    peak = self_consistent_peak(op, mech);
    width = std::max(effective_dynamics(peak, op, mech).gamma_eff,
                     1e-9 * mech.omega_m);
  } catch (const Error&) {
    peak = mech.omega_m;  // anti-damped or collapsed: still emit a sane grid
    width = std::max(mech.gamma_m, 1e-9 * mech.omega_m);
  }
  const double lo_dense = std::max(peak - 20.0 * width, 0.05 * peak);
  const double hi_dense = peak + 20.0 * width;

  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n_dense + 2 * n_wing) + 4);
  const double wing_lo = 0.02 * peak;
  for (int i = 0; i < n_wing; ++i) {  // left wing, log spaced
    const double t = double(i) / n_wing;
    grid.push_back(wing_lo * std::pow(lo_dense / wing_lo, t));
  }
  for (int i = 0; i <= n_dense; ++i)
    grid.push_back(lo_dense + (hi_dense - lo_dense) * double(i) / n_dense);
  const double wing_hi = 2.5 * peak;
  for (int i = 1; i <= n_wing; ++i) {  // right wing
    const double t = double(i) / n_wing;
    grid.push_back(hi_dense * std::pow(wing_hi / hi_dense, t));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace optomech
