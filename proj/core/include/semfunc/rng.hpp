#ifndef SEMFUNC_RNG_HPP
#define SEMFUNC_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace semfunc {

// Deterministic random stream. std::mt19937_64 output is pinned by the
// standard; the derived draws below avoid std::*_distribution, whose
// sequences are implementation-defined and would break run-to-run
// byte-identical artifacts if the toolchain ever changed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) via rejection; bound > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) {
      x = engine_();
    }
    return x % bound;
  }

  // Uniform in [lo, hi).
  double next_in(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  // Fisher-Yates, explicit so the permutation sequence is ours, not the
  // standard library's.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace semfunc

#endif
