#include "optomech/rng.hpp"

#include <cmath>

namespace optomech {

namespace {

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

}  // namespace

uint64_t splitmix64_next(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Xoshiro256pp::Xoshiro256pp(uint64_t seed) {
  uint64_t sm = seed;
  for (auto& w : s_) w = splitmix64_next(sm);
}

uint64_t Xoshiro256pp::next() {
  const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256pp::uniform01() { return double(next() >> 11) * kInv53; }

double Xoshiro256pp::uniform01_open() {
  return double((next() >> 11) + 1) * kInv53;
}

double Xoshiro256pp::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01_open();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

uint64_t derive_stream_seed(uint64_t seed, uint64_t stream) {
  // Two splitmix steps decorrelate even adjacent (seed, stream) pairs.
  uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  uint64_t a = splitmix64_next(s);
  uint64_t b = splitmix64_next(s);
  return a ^ rotl(b, 32);
}

void fill_normals(Xoshiro256pp& rng, double* out, std::size_t n) {
  // Box-Muller in blocks: the u-draw loop and the transform loop are kept
  // separate so the compiler can vectorize sqrt/log/sincos over the block.
  constexpr std::size_t kBlock = 512;
  double u1[kBlock], u2[kBlock];
  std::size_t produced = 0;
  while (produced < n) {
    const std::size_t pairs = std::min(kBlock, (n - produced + 1) / 2);
    for (std::size_t i = 0; i < pairs; ++i) {
      u1[i] = rng.uniform01_open();
      u2[i] = rng.uniform01();
    }
    for (std::size_t i = 0; i < pairs; ++i) {
      const double r = std::sqrt(-2.0 * std::log(u1[i]));
      const double a = 6.283185307179586476925286766559 * u2[i];
      const double c = std::cos(a);
      const double s = std::sin(a);
      out[produced + 2 * i] = r * c;
      if (produced + 2 * i + 1 < n) out[produced + 2 * i + 1] = r * s;
    }
    produced += 2 * pairs;
    if (produced > n) produced = n;
  }
}

}  // namespace optomech
