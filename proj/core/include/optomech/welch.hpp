#pragma once

// Streaming Welch spectral estimation: Hann window, 50% overlap, two-sided
// angular-frequency density. Built to consume decimated SDE output sample by
// sample so trajectories never need to be stored whole.

#include <cstddef>
#include <memory>
#include <vector>

namespace optomech {

class WelchAccumulator {
 public:
  WelchAccumulator(std::size_t nfft, double dt);
  ~WelchAccumulator();
  WelchAccumulator(const WelchAccumulator&) = delete;
  WelchAccumulator& operator=(const WelchAccumulator&) = delete;

  void push(double x);
  // Drops the partially filled segment; call between independent streams so a
  // segment never straddles a trajectory boundary.
  void end_stream();

  std::size_t segments() const;
  std::size_t nfft() const;
  double dt() const;

  // Bins k = 0..nfft/2 at omega_k = 2 pi k / (nfft dt). Normalized so that a
  // white sequence of variance v gives a flat density v * dt.
  std::vector<double> psd() const;        // two-sided angular (== two-sided per-Hz)
  std::vector<double> omega() const;      // rad/s
  std::vector<double> freq_hz() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Boxcar (Daniell) smoothing with the window truncated at the edges.
std::vector<double> daniell_smooth(const std::vector<double>& psd, int halfwidth);

// One-shot helper for in-memory signals.
struct PsdEstimate {
  std::vector<double> omega;
  std::vector<double> psd;
  std::size_t segments;
};
PsdEstimate welch_psd(const std::vector<double>& x, double dt, std::size_t nfft);

}  // namespace optomech
