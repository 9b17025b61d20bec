#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bnoma {

// splitmix64 step; used both as a stream mixer and to derive independent
// per-realization seeds so parallel Monte Carlo reproduces the serial order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a) {
  return splitmix64(master ^ splitmix64(a + 0x2545f4914f6cdd1dULL));
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(master, a), b);
}

// Deterministic random stream with hand-rolled transforms. The draw count of
// every transform is fixed, so streams stay aligned across parameter values
// that share a seed (paired sweep comparisons rely on this).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // exponential(1); mean 1. |H|^2 for unit Rayleigh H.
  double exponential() { return -std::log1p(-uniform()); }

  // standard normal via Box-Muller, exactly two uniforms per draw
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace bnoma
