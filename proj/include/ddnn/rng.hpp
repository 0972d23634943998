#pragma once

#include <cmath>
#include <cstdint>

namespace ddnn {

/// Deterministic splitmix64 generator with Box-Muller normals.
///
/// std::normal_distribution is implementation-defined, so hand-rolling the
/// normal transform keeps checkpoints and seeded runs reproducible across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in (0, 1).
  double next_uniform() {
    // 53 random mantissa bits, shifted away from exact 0.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw (Box-Muller, pair-cached).
  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  /// Derives an independent stream seed from (seed, tag, index).
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t tag,
                           std::uint64_t index) {
    Rng r(seed ^ (tag * 0x9e3779b97f4a7c15ULL) ^ (index + 1));
    r.next_u64();
    return r.next_u64();
  }

 private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace ddnn
