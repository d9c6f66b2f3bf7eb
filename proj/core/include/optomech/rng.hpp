#pragma once

// Deterministic random numbers. xoshiro256++ seeded through splitmix64, plus a
// block Box-Muller transform for the standard normals the SDE integrator
// consumes. Streams derived from (seed, stream_index) are independent for all
// practical purposes and stable across platforms and runs.

#include <cstddef>
#include <cstdint>

namespace optomech {

uint64_t splitmix64_next(uint64_t& state);

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(uint64_t seed);
  uint64_t next();
  double uniform01();        // in [0, 1)
  double uniform01_open();   // in (0, 1], safe as a log() argument
  double normal();           // single draw; for bulk use fill_normals

 private:
  uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Derives the per-trajectory stream seed. Distinct (seed, stream) pairs give
// unrelated generator states.
uint64_t derive_stream_seed(uint64_t seed, uint64_t stream);

// Fills out[0..n) with iid standard normals; n may be odd. Vectorized TU.
void fill_normals(Xoshiro256pp& rng, double* out, std::size_t n);

}  // namespace optomech
