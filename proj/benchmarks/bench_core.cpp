// Microbenchmarks for the hot paths: spectrum evaluation, operating point
// solves, variance quadrature, propagator construction, stochastic stepping,
// and the estimation loop. Run manually; not part of the test suite.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "optomech/config.hpp"
#include "optomech/peak_fit.hpp"
#include "optomech/response.hpp"
#include "optomech/rng.hpp"
#include "optomech/sde_oracle.hpp"
#include "optomech/slab_optics.hpp"
#include "optomech/spectra.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/thermometry.hpp"
#include "optomech/welch.hpp"

namespace om = optomech;

namespace {

const om::SystemParams& nominal() {
  static const om::SystemParams p = om::build_params(om::default_config());
  return p;
}

const om::OperatingPoint& nominal_op() {
  static const om::OperatingPoint op = [] {
    const om::SystemParams& p = nominal();
    auto disp = om::make_dispersion(p);
    return om::solve_fixed_detuning(p, *disp);
  }();
  return op;
}

om::ConfigMap slab_config() {
  om::ConfigMap cm = om::default_config();
  cm.erase("target_g_over_omega_m");
  cm.erase("target_h_over_omega_m");
  cm["dispersion_mode"] = "slab";
  cm["membrane_thickness_m"] = "50e-9";
  cm["membrane_n_real"] = "2.1";
  cm["membrane_n_imag"] = "2e-6";
  cm["membrane_z0_m"] = "1e-8";
  return cm;
}

void bm_s_q(benchmark::State& state) {
  const om::SystemParams& p = nominal();
  const om::OperatingPoint& op = nominal_op();
  double w = p.mech.omega_m - 5000.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(om::s_q(w, op, p.mech, p.bath));
    w += 1e-3;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_s_q);

void bm_chi_eff(benchmark::State& state) {
  const om::SystemParams& p = nominal();
  const om::OperatingPoint& op = nominal_op();
  double w = p.mech.omega_m;
  for (auto _ : state) {
    benchmark::DoNotOptimize(om::chi_eff(w, op, p.mech));
    w += 1e-3;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_chi_eff);

void bm_solve_fixed_detuning(benchmark::State& state) {
  const om::SystemParams& p = nominal();
  auto disp = om::make_dispersion(p);
  for (auto _ : state) benchmark::DoNotOptimize(om::solve_fixed_detuning(p, *disp));
}
BENCHMARK(bm_solve_fixed_detuning);

void bm_slab_dispersion(benchmark::State& state) {
  const om::SystemParams p = om::build_params(slab_config());
  auto disp = om::make_dispersion(p);
  double z = 1e-8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(disp->omega(z));
    benchmark::DoNotOptimize(disp->d2omega_dz2(z));
    z += 1e-12;
  }
}
BENCHMARK(bm_slab_dispersion);

void bm_stationary_variances(benchmark::State& state) {
  const om::SystemParams& p = nominal();
  const om::OperatingPoint& op = nominal_op();
  for (auto _ : state)
    benchmark::DoNotOptimize(om::stationary_variances(op, p.mech, p.bath));
}
BENCHMARK(bm_stationary_variances);

void bm_lyapunov_covariance(benchmark::State& state) {
  const om::SystemParams& p = nominal();
  const om::OperatingPoint& op = nominal_op();
  for (auto _ : state)
    benchmark::DoNotOptimize(om::stationary_covariance(op, p.mech, p.bath));
}
BENCHMARK(bm_lyapunov_covariance);

void bm_make_propagator(benchmark::State& state) {
  const om::SystemParams& p = nominal();
  const om::OperatingPoint& op = nominal_op();
  const double dt = 0.05 / om::max_rate(op, p.mech);
  for (auto _ : state)
    benchmark::DoNotOptimize(om::make_propagator(op, p.mech, p.bath, dt));
}
BENCHMARK(bm_make_propagator);

void bm_sde_steps(benchmark::State& state) {
  const om::SystemParams& p = nominal();
  const om::OperatingPoint& op = nominal_op();
  om::SimConfig cfg;
  const double dt = 0.05 / om::max_rate(op, p.mech);
  cfg.dt = dt;
  cfg.duration = 16384 * dt;
  cfg.record_stride = 16384;
  uint64_t seed = 1;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(om::integrate(p, op, cfg));
  }
  state.SetItemsProcessed(state.iterations() * 16384);
}
BENCHMARK(bm_sde_steps);

void bm_welch_push(benchmark::State& state) {
  std::vector<double> x(1 << 16);
  om::Xoshiro256pp rng(42);
  om::fill_normals(rng, x.data(), x.size());
  for (auto _ : state) {
    om::WelchAccumulator acc(4096, 1e-6);
    for (double v : x) acc.push(v);
    acc.end_stream();
    benchmark::DoNotOptimize(acc.segments());
  }
  state.SetItemsProcessed(state.iterations() * int64_t(x.size()));
}
BENCHMARK(bm_welch_push);

void bm_lorentzian_fit(benchmark::State& state) {
  const om::SystemParams& p = nominal();
  const om::OperatingPoint& op = nominal_op();
  const double wp = om::self_consistent_peak(op, p.mech);
  const double ge = om::effective_dynamics(wp, op, p.mech).gamma_eff;
  std::vector<double> w, s;
  for (int i = 0; i < 301; ++i) {
    const double wi = wp + ge * (-8.0 + 16.0 * i / 300.0);
    w.push_back(wi);
    s.push_back(om::s_q(wi, op, p.mech, p.bath));
  }
  uint64_t seed = 1;
  for (auto _ : state) {
    const std::vector<double> noisy = om::synth_spectrum(s, 200, seed++);
    benchmark::DoNotOptimize(om::fit_lorentzian(w, noisy, 200));
  }
}
BENCHMARK(bm_lorentzian_fit);

}  // namespace

BENCHMARK_MAIN();
