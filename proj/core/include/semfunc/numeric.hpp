#ifndef SEMFUNC_NUMERIC_HPP
#define SEMFUNC_NUMERIC_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace semfunc {

// logistic(z) = 1 / (1 + e^-z), evaluated without overflow on either tail.
inline double logistic(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// softplus(z) = log(1 + e^z); for large z returns z + log1p(e^-z) so the
// intermediate never overflows.
inline double softplus(double z) {
  if (z > 0.0) {
    return z + std::log1p(std::exp(-z));
  }
  return std::log1p(std::exp(z));
}

// log logistic(z) = -softplus(-z). Stays finite down to z = -inf only.
inline double log_logistic(double z) { return -softplus(-z); }

// splitmix64: used to derive independent seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeded FNV-1a over bytes. Stable across platforms and runs, which is what
// pins corpus projections to a reproducible column layout.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ULL ^ seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace semfunc

#endif
