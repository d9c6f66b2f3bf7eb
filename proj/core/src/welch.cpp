#include "optomech/welch.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

struct WelchAccumulator::Impl {
  std::size_t nfft = 0;
  std::size_t half = 0;
  double dt = 0.0;
  double window_power = 0.0;  // sum of squared window samples
  std::vector<double> window;
  std::vector<double> ring;   // pending samples, size < nfft
  std::size_t fill = 0;
  std::vector<double> accum;  // sum over segments of |X_k|^2
  std::size_t n_segments = 0;

  double* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;

  explicit Impl(std::size_t n, double step) : nfft(n), half(n / 2), dt(step) {
    if (n < 8 || (n % 2) != 0) fail(errc::bad_argument, "welch nfft must be even and >= 8");
    if (!(step > 0.0)) fail(errc::bad_argument, "welch sample step must be positive");
    window.resize(nfft);
    for (std::size_t i = 0; i < nfft; ++i) {
      // Periodic Hann window.
      window[i] = 0.5 * (1.0 - std::cos(two_pi * double(i) / double(nfft)));
      window_power += window[i] * window[i];
    }
    ring.assign(nfft, 0.0);
    accum.assign(half + 1, 0.0);
    in = fftw_alloc_real(nfft);
    out = fftw_alloc_complex(half + 1);
    if (!in || !out) fail(errc::bad_argument, "fftw allocation failed");
    plan = fftw_plan_dft_r2c_1d(int(nfft), in, out, FFTW_ESTIMATE);
    if (!plan) fail(errc::bad_argument, "fftw plan creation failed");
  }

  ~Impl() {
    if (plan) fftw_destroy_plan(plan);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }

  void process_segment() {
    for (std::size_t i = 0; i < nfft; ++i) in[i] = ring[i] * window[i];
    fftw_execute(plan);
    for (std::size_t k = 0; k <= half; ++k) {
      const double re = out[k][0];
      const double im = out[k][1];
      accum[k] += re * re + im * im;
    }
    ++n_segments;
    // 50% overlap: slide the second half down.
    std::memmove(ring.data(), ring.data() + half, half * sizeof(double));
    fill = half;
  }
};

WelchAccumulator::WelchAccumulator(std::size_t nfft, double dt)
    : impl_(std::make_unique<Impl>(nfft, dt)) {}

WelchAccumulator::~WelchAccumulator() = default;

void WelchAccumulator::push(double x) {
  Impl& s = *impl_;
  s.ring[s.fill++] = x;
  if (s.fill == s.nfft) s.process_segment();
}

void WelchAccumulator::end_stream() {
  impl_->fill = 0;
}

std::size_t WelchAccumulator::segments() const { return impl_->n_segments; }
std::size_t WelchAccumulator::nfft() const { return impl_->nfft; }
double WelchAccumulator::dt() const { return impl_->dt; }

std::vector<double> WelchAccumulator::psd() const {
  const Impl& s = *impl_;
  if (s.n_segments == 0) fail(errc::bad_argument, "welch psd requested before any full segment");
  std::vector<double> p(s.half + 1);
  const double scale = s.dt / (s.window_power * double(s.n_segments));
  for (std::size_t k = 0; k <= s.half; ++k) p[k] = s.accum[k] * scale;
  return p;
}

std::vector<double> WelchAccumulator::omega() const {
  const Impl& s = *impl_;
  std::vector<double> w(s.half + 1);
  const double dw = two_pi / (double(s.nfft) * s.dt);
  for (std::size_t k = 0; k <= s.half; ++k) w[k] = dw * double(k);
  return w;
}

std::vector<double> WelchAccumulator::freq_hz() const {
  std::vector<double> f = omega();
  for (double& v : f) v /= two_pi;
  return f;
}

std::vector<double> daniell_smooth(const std::vector<double>& psd, int halfwidth) {
  if (halfwidth < 0) fail(errc::bad_argument, "daniell halfwidth must be >= 0");
  if (halfwidth == 0 || psd.empty()) return psd;
  const long n = long(psd.size());
  std::vector<double> out(psd.size());
  for (long i = 0; i < n; ++i) {
    const long lo = std::max(0L, i - halfwidth);
    const long hi = std::min(n - 1, i + halfwidth);
    double acc = 0.0;
    for (long j = lo; j <= hi; ++j) acc += psd[std::size_t(j)];
    out[std::size_t(i)] = acc / double(hi - lo + 1);
  }
  return out;
}

PsdEstimate welch_psd(const std::vector<double>& x, double dt, std::size_t nfft) {
  WelchAccumulator acc(nfft, dt);
  for (double v : x) acc.push(v);
  PsdEstimate est;
  est.omega = acc.omega();
  est.psd = acc.psd();
  est.segments = acc.segments();
  return est;
}

}  // namespace optomech
