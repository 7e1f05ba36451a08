#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ghelab {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-keyed seed for work item (path, stream). Stream 0 drives the
/// simulation of a path; stream s >= 1 drives its s-th shuffle. Each stage is
/// a bijection, so seeds are pairwise distinct across paths for a fixed stream.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t path,
                                    std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ path) ^ stream);
}

/// Seeded random source passed explicitly to every stochastic operation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Unbiased integer in [0, n), n >= 1 (Lemire's multiply-shift rejection).
  std::uint64_t below(std::uint64_t n) {
    auto m = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal draw.
  double normal() { return normal_(engine_); }

  /// Exponential(1) draw.
  double exponential() { return -std::log(uniform()); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ghelab
