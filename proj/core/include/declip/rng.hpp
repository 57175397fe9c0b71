#pragma once

#include <cstdint>
#include <random>

namespace declip {

// Deterministic random stream. Uniform and normal variates are mapped from
// raw mt19937_64 output by hand so that a given seed yields the same byte
// stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on the open interval (0, 1). Never returns 0 or 1, so inverse-CDF
  // transforms with poles at the endpoints stay finite.
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes two uniforms per pair and caches
  // the spare so the stream stays reproducible.
  double normal();

  double normal(double sigma) { return sigma * normal(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stateless seed derivation (splitmix64 over the pair). Used to give each
// agent inside one run its own independent stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Seed of the `run_index`-th run under a master seed. The splitting rule is
// part of the reproducibility contract: master_seed + run_index.
inline std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
  return master_seed + run_index;
}

}  // namespace declip
