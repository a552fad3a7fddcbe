#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cpepc {

/// splitmix64 finaliser; used to derive independent stream seeds from one run seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t { kWorkload = 1, kPolicy = 2, kCommunity = 3, kReplacement = 4 };

constexpr std::uint64_t stream_seed(std::uint64_t run_seed, Stream s) {
  return mix_seed(mix_seed(run_seed) ^ static_cast<std::uint64_t>(s));
}

/// Thin wrapper over std::mt19937_64. The std distributions are
/// implementation-defined, so draws are derived from raw engine output here to
/// keep runs bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling removes modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cpepc
