#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, index), so simulations can be generated in any order, in
// parallel, with bit-identical results. Streams keep the common-factor,
// loading, and idiosyncratic draws disjoint, which is what makes panels
// nested in N and T (growing a panel extends it without perturbing the
// existing draws).

#include <cstdint>

namespace panelbreak {

// splitmix64 finalizer: a full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Standard normal quantile function on (0, 1). Initial rational
// approximation refined by Halley steps against erfc to near machine
// precision. Throws InvalidInput outside (0, 1).
double inverse_normal_cdf(double p);

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed)
      : base_(mix64(seed + 0x6A09E667F3BCC909ull)) {}

  std::uint64_t word(std::uint64_t stream, std::uint64_t index) const {
    const std::uint64_t h = base_ ^ mix64(stream + 0x9E3779B97F4A7C15ull);
    return mix64(h ^ mix64(index + 0xD1B54A32D192ED03ull));
  }

  // Uniform on the open interval (0, 1): 53-bit mantissa, half-step offset.
  double uniform01(std::uint64_t stream, std::uint64_t index) const {
    return (static_cast<double>(word(stream, index) >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(std::uint64_t stream, std::uint64_t index, double lo,
                 double hi) const {
    return lo + uniform01(stream, index) * (hi - lo);
  }

  // Standard normal via the inverse CDF (deterministic, no rejection).
  double normal(std::uint64_t stream, std::uint64_t index) const;

 private:
  std::uint64_t base_;
};

}  // namespace panelbreak
