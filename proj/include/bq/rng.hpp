#pragma once

// Seeded generator with self-contained uniform/normal mappings so identical
// seeds reproduce identical streams regardless of standard library.

#include <cmath>
#include <cstdint>
#include <random>

#include "bq/algebra.hpp"

namespace bq {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    // 53-bit mantissa mapping
    double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Complex complex_in(double scale) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

  Vec3 unit_vec() {
    while (true) {
      Vec3 v{normal(), normal(), normal()};
      double n = norm(v);
      if (n > 1e-6) return (1.0 / n) * v;
    }
  }

  Biquaternion biquaternion(double scale = 1.0) {
    return {complex_in(scale), Vec3c{complex_in(scale), complex_in(scale), complex_in(scale)}};
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bq
