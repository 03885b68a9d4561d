#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <string_view>

namespace jm {

/// splitmix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_string(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Stable seed for a cell of an experiment grid, e.g. (setup, tree, size, rep).
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t c : coords) h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

/// Seeded generator with platform-independent draws.
///
/// The standard distributions are implementation-defined, so bounded integers
/// and unit reals are derived from the raw engine output directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(uniform_index(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Uniform in [0, 1).
  double uniform_real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform_real() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace jm
