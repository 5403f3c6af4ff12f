#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "exactpot/rational.hpp"

namespace exactpot {

/// Seeded generator with platform-independent draws. The standard
/// distributions are implementation-defined, so integer and real draws are
/// derived directly from the 64-bit engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal by Box-Muller.
  double normal() {
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Integer vector in [-bound, bound]^n without the origin.
  std::vector<Rational> nonzero_integer_point(std::size_t n, std::int64_t bound) {
    std::vector<Rational> p(n);
    bool nonzero = false;
    while (!nonzero) {
      for (auto& x : p) {
        x = Rational(static_cast<long>(uniform_int(-bound, bound)));
        nonzero = nonzero || x != 0;
      }
    }
    return p;
  }

  /// Rational vector with numerators in [-num_bound, num_bound] and
  /// denominators in [1, den_bound], not the origin.
  std::vector<Rational> nonzero_rational_point(std::size_t n, std::int64_t num_bound, std::int64_t den_bound) {
    std::vector<Rational> p(n);
    bool nonzero = false;
    while (!nonzero) {
      for (auto& x : p) {
        x = Rational(static_cast<long>(uniform_int(-num_bound, num_bound)),
                     static_cast<unsigned long>(uniform_int(1, den_bound)));
        x.canonicalize();
        nonzero = nonzero || x != 0;
      }
    }
    return p;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace exactpot
