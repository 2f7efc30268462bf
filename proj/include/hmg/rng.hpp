#pragma once

// Seedable, splittable random generator used by every sampler in the library.
//
// Requirements this implements:
//  - identical (seed, substream path) -> identical draws, independent of how
//    many draws earlier substreams consumed (so rejection attempt k is
//    reproducible no matter how attempts 0..k-1 went);
//  - no dependence on std library distribution internals (std::shuffle and
//    std::uniform_int_distribution are implementation-defined), so bounded
//    draws and Fisher-Yates live here.
//
// Engine: xoshiro256** seeded through splitmix64 (Blackman/Vigna constants).

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace hmg {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : state_) w = detail::splitmix64(x);
  }

  // Substream derivation: fold the path into the seed with splitmix steps.
  // Distinct paths give (for all practical purposes) independent streams.
  static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t x = seed;
    (void)detail::splitmix64(x);
    for (std::uint64_t p : path) {
      x ^= 0x2545f4914f6cdd1dULL * (p + 0x632be59bd9b4e019ULL);
      (void)detail::splitmix64(x);
    }
    return Rng(x);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, n); unbiased via rejection on the top multiple of n.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Poisson draw by inversion (fine for the means used here, <= ~60).
  int poisson(double mean) {
    double u = uniform01();
    int k = 0;
    double p = std::exp(-mean);
    double cum = p;
    while (u >= cum && k < 4000) {
      ++k;
      p *= mean / k;
      cum += p;
    }
    return k;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace hmg
