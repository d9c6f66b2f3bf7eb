#include "optomech/peak_fit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "optomech/errors.hpp"
#include "optomech/rng.hpp"

namespace optomech {

std::vector<double> synth_spectrum(const std::vector<double>& s_true,
                                   int snapshots, uint64_t seed) {
  if (snapshots < 1) fail(errc::bad_argument, "snapshots must be >= 1");
  Xoshiro256pp rng(derive_stream_seed(seed, 0x53594e5448ULL));
  std::vector<double> out(s_true.size());
  const double inv_m = 1.0 / snapshots;
  for (std::size_t i = 0; i < s_true.size(); ++i) {
    double acc = 0.0;  // sum of `snapshots` unit exponentials
    for (int j = 0; j < snapshots; ++j) acc -= std::log(rng.uniform01_open());
    out[i] = s_true[i] * acc * inv_m;
  }
  return out;
}

namespace {

struct Model {
  // parameter order: floor, slope, height, center, fwhm
  static double eval(const double* b, double w) {
    const double hw = 0.5 * b[4];
    const double dx = w - b[3];
    const double lor = hw * hw / (dx * dx + hw * hw);
    return b[0] + b[1] * dx + b[2] * lor;
  }
  static void jacobian(const double* b, double w, double* j) {
    const double hw = 0.5 * b[4];
    const double dx = w - b[3];
    const double den = dx * dx + hw * hw;
    const double lor = hw * hw / den;
    j[0] = 1.0;
    j[1] = dx;
    j[2] = lor;
    j[3] = -b[1] + b[2] * lor * 2.0 * dx / den;
    j[4] = b[2] * hw * dx * dx / (den * den);  // d lor / d fwhm = hw dx^2 / den^2
  }
};

}  // namespace

FitResult fit_lorentzian(const std::vector<double>& omega,
                         const std::vector<double>& psd, int snapshots) {
  const std::size_t n = omega.size();
  if (n != psd.size() || n < 12)
    fail(errc::bad_argument, "fit needs matching arrays with at least 12 bins");
  if (snapshots < 1) fail(errc::bad_argument, "snapshots must be >= 1");

  // initial guesses from moments of the data
  std::vector<double> edges;
  const std::size_t tail = std::max<std::size_t>(3, n / 10);
  for (std::size_t i = 0; i < tail; ++i) edges.push_back(psd[i]);
  for (std::size_t i = n - tail; i < n; ++i) edges.push_back(psd[i]);
  std::nth_element(edges.begin(), edges.begin() + edges.size() / 2, edges.end());
  const double floor0 = std::max(edges[edges.size() / 2], 0.0);

  std::size_t imax = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (psd[i] > psd[imax]) imax = i;
  const double height0 = psd[imax] - floor0;
  const double floor_sigma = std::max(floor0, 1e-300) / std::sqrt(double(snapshots));
  if (!(height0 > 5.0 * floor_sigma))
    fail(errc::no_peak_found, "no line rises above the floor noise");

  const double half = floor0 + 0.5 * height0;
  std::size_t ilo = imax, ihi = imax;
  while (ilo > 0 && psd[ilo] > half) --ilo;
  while (ihi + 1 < n && psd[ihi] > half) ++ihi;
  if (ilo == 0 && ihi == n - 1)
    fail(errc::no_peak_found, "line spans the whole window; widen the grid");
  double width0 = omega[ihi] - omega[ilo];
  if (!(width0 > 0.0)) width0 = (omega.back() - omega.front()) / 10.0;

  double b[5] = {floor0, 0.0, height0, omega[imax], width0};

  Eigen::VectorXd r(n);
  Eigen::Matrix<double, Eigen::Dynamic, 5> jac(n, 5);
  const double sqm = std::sqrt(double(snapshots));
  std::vector<double> sig(n);
  auto fill = [&](const double* beta, bool with_jac) {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double resid = (Model::eval(beta, omega[i]) - psd[i]) / sig[i];
      r(long(i)) = resid;
      chi2 += resid * resid;
      if (with_jac) {
        double j[5];
        Model::jacobian(beta, omega[i], j);
        for (int c = 0; c < 5; ++c) jac(long(i), c) = j[c] / sig[i];
      }
    }
    return chi2;
  };

  int it_total = 0;
  double chi2 = 0.0;
  auto run_lm = [&]() {
    double lambda = 1e-3;
    chi2 = fill(b, true);
    int it = 0;
    for (; it < 200; ++it) {
      const Eigen::Matrix<double, 5, 5> jtj = jac.transpose() * jac;
      const Eigen::Matrix<double, 5, 1> jtr = jac.transpose() * r;
      Eigen::Matrix<double, 5, 5> damped = jtj;
      for (int c = 0; c < 5; ++c) damped(c, c) += lambda * jtj(c, c);
      const Eigen::Matrix<double, 5, 1> step = damped.ldlt().solve(-jtr);
      if (!step.allFinite()) fail(errc::fit_diverged, "singular normal equations");
      double trial[5];
      for (int c = 0; c < 5; ++c) trial[c] = b[c] + step(c);
      const double chi2_trial = fill(trial, false);
      if (std::isfinite(chi2_trial) && chi2_trial < chi2) {
        double rel = 0.0;
        for (int c = 0; c < 5; ++c)
          rel = std::max(rel, std::abs(step(c)) / std::max(1e-300, std::abs(trial[c])));
        const double drop = chi2 - chi2_trial;
        std::copy(trial, trial + 5, b);
        chi2 = fill(b, true);
        lambda = std::max(lambda / 3.0, 1e-12);
        // the step test alone stalls when a parameter sits at zero, so a
        // negligible chi2 improvement also counts as converged
        if (rel < 1e-10 || drop < 1e-12 * (1.0 + chi2)) break;
      } else {
        // a rejected proposal that barely moves any parameter means the current
        // point is numerically stationary; treat that as converged too
        double rel = 0.0;
        for (int c = 0; c < 5; ++c)
          rel = std::max(rel, std::abs(step(c)) / std::max(1e-300, std::abs(b[c])));
        if (rel < 1e-10) {
          fill(b, true);
          break;
        }
        lambda *= 3.0;
        if (lambda > 1e12) fail(errc::fit_diverged, "damping exploded, no descent");
        fill(b, true);
      }
    }
    if (it == 200) fail(errc::fit_diverged, "iteration budget exhausted");
    it_total += it;
  };

  // chi-squared averaging noise scales with the true spectrum, so the honest
  // per-bin sigma is the underlying PSD over sqrt(snapshots). Start from the
  // data as the best available estimate, then reweight from the fitted model:
  // weighting by the noisy data itself biases every amplitude-like parameter
  // low by O(1/snapshots), which the reweighted rounds remove.
  for (std::size_t i = 0; i < n; ++i) sig[i] = std::max(psd[i], 1e-300) / sqm;
  run_lm();
  for (int round = 0; round < 2; ++round) {
    const double scale = std::abs(b[0]) + std::abs(b[2]);
    for (std::size_t i = 0; i < n; ++i)
      sig[i] = std::max(Model::eval(b, omega[i]), 1e-12 * scale) / sqm;
    run_lm();
  }

  b[4] = std::abs(b[4]);  // the model is even in fwhm
  if (!(b[4] > 0.0) || b[3] < omega.front() || b[3] > omega.back())
    fail(errc::fit_diverged, "fit left the data window");

  FitResult out{};
  out.floor = b[0];
  out.floor_slope = b[1];
  out.height = b[2];
  out.center = b[3];
  out.fwhm = b[4];
  out.iterations = it_total;
  out.residual_rms = std::sqrt(chi2 / double(n));

  fill(b, true);
  const Eigen::Matrix<double, 5, 5> cov = (jac.transpose() * jac).inverse();
  for (int rr = 0; rr < 5; ++rr)
    for (int cc = 0; cc < 5; ++cc) out.covariance[rr * 5 + cc] = cov(rr, cc);
  out.center_err = std::sqrt(std::max(0.0, cov(3, 3)));
  out.fwhm_err = std::sqrt(std::max(0.0, cov(4, 4)));
  out.height_err = std::sqrt(std::max(0.0, cov(2, 2)));
  return out;
}

}  // namespace optomech
