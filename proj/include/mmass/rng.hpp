#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace mmass {

using Rng = std::mt19937_64;

// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable per-task seed from (master, a, b); independent of thread scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(mix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL + 1));
}

// Uniform on the open interval (0, 1).
inline double uniform01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// log of a Gamma(shape, 1) variate. Shapes below one use
// Gamma(a) = Gamma(a + 1) * U^{1/a}, kept in log space so tiny shapes never
// underflow to zero.
inline double log_gamma_variate(double shape, Rng& rng) {
  if (shape >= 1.0) {
    std::gamma_distribution<double> g(shape, 1.0);
    return std::log(g(rng));
  }
  std::gamma_distribution<double> g(shape + 1.0, 1.0);
  return std::log(g(rng)) + std::log(uniform01(rng)) / shape;
}

// log of a Beta(a, b) variate from two gammas.
inline double log_beta_variate(double a, double b, Rng& rng) {
  const double lx = log_gamma_variate(a, rng);
  const double ly = log_gamma_variate(b, rng);
  const double m = std::max(lx, ly);
  return lx - (m + std::log(std::exp(lx - m) + std::exp(ly - m)));
}

inline double beta_variate(double a, double b, Rng& rng) { return std::exp(log_beta_variate(a, b, rng)); }

}  // namespace mmass
