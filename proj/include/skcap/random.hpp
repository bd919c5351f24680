#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace skcap {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded random stream with platform-independent draws.
///
/// Only the raw engine output is used (no std:: distributions, whose
/// algorithms are implementation-defined), so a given seed replays
/// bit-identically across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  /// Stream for work item `index` of purpose `tag` under `seed`.
  static Rng derive(std::uint64_t seed, std::uint64_t index,
                    std::uint64_t tag = 0) {
    return Rng(mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL)) ^
               mix64(tag));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection keeps the draw unbiased.
    const std::uint64_t limit = -n % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r < limit);
    return r % n;
  }

  /// Index drawn from a normalized probability vector.
  std::size_t categorical(std::span<const double> p) {
    const double r = uniform();
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= 0.0) continue;
      acc += p[i];
      last = i;
      if (r < acc) return i;
    }
    return last;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace skcap
