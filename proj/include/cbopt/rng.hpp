#pragma once

#include <cstdint>

namespace cbopt {

// Deterministic across platforms and builds; std:: distributions are not.
uint64_t splitmix64(uint64_t& state);

// Derives an independent stream seed from a master seed and run indices.
uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0);

class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();
  // Uniform on [0, 1).
  double uniform();
  // Standard normal via Box-Muller; second value of each pair is cached.
  double normal();
  // Uniform integer in [0, n), n >= 1, rejection sampled (no modulo bias).
  uint64_t below(uint64_t n);

 private:
  uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cbopt
