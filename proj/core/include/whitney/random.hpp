#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace whitney {

/// splitmix64; small, fast and identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  /// Log-uniform in [lo, hi], lo > 0.
  double log_uniform(double lo, double hi) { return lo * std::pow(hi / lo, uniform()); }

  /// Derived stream for a sub-task, independent of how much the parent was used.
  Rng fork(std::uint64_t tag) const { return Rng(state_ ^ (tag * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull)); }

 private:
  std::uint64_t state_;
};

/// FNV-1a; used to derive per-stratum streams from ids.
inline std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace whitney
