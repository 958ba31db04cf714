#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// All randomness in the toolkit flows through these helpers instead of the
// distribution classes in <random>, whose algorithms are implementation
// defined. mt19937_64 plus the explicit transforms below give bit-identical
// streams on every platform. Identifier for reports: kRngId.

namespace gdpkit {

inline constexpr const char* kRngId = "mt19937_64/box-muller-v1";

// SplitMix64 finalizer; used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n). Modulo bias is negligible for the index ranges
// used here and keeps the draw portable.
inline std::size_t bounded_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

// Fisher-Yates with explicit draws (std::shuffle is implementation defined).
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = bounded_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

// Standard normal samples via the Box-Muller transform, pair-cached.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform_unit(rng_);  // (0, 1]: keeps log() finite
    double u2 = uniform_unit(rng_);
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gdpkit
