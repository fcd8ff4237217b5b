#ifndef SHIFTQP_RNG_HPP
#define SHIFTQP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace shiftqp {

/// Deterministic random stream. Same seed, same platform, same sequence;
/// all draws go through fixed transformations of raw mt19937_64 output so
/// results do not depend on libstdc++ distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on [0, 1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform on [-1, 1).
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; caches the second deviate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Uniform integer on [0, bound) by rejection; bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = eng_();
    while (x >= limit) x = eng_();
    return x % bound;
  }

 private:
  std::mt19937_64 eng_;
  double spare_{0.0};
  bool has_spare_{false};
};

}  // namespace shiftqp

#endif
