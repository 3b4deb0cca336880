#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace daf {

// SplitMix64 finalizer; decorrelates nearby user seeds before they reach the engine.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds a sequence of keys into one stream seed, e.g. (master, point, block).
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (auto k : keys) h = mix_seed(h ^ mix_seed(k));
  return h;
}

/// Circularly-symmetric complex Gaussian CN(0, variance).
class ComplexGaussian {
 public:
  explicit ComplexGaussian(double variance) : normal_(0.0, std::sqrt(0.5 * variance)) {}

  template <class Engine>
  std::complex<double> operator()(Engine& eng) {
    const double re = normal_(eng);
    const double im = normal_(eng);
    return {re, im};
  }

 private:
  std::normal_distribution<double> normal_;
};

}  // namespace daf
