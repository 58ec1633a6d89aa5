#pragma once

// Space-time interpolation over stored field stacks: trilinear in space with
// periodic wraparound, Lagrange (up to 4-point cubic) in time.  Backs both
// Lorentz field resampling and the retarded-source evaluations of the
// light-cone solvers.

#include <algorithm>
#include <functional>

#include "bq/field.hpp"

namespace bq {

namespace detail {

inline Biquaternion lerp_weighted(const BiqField& f, int i1, int i2, int i3, double w,
                                  Biquaternion acc) {
  const Biquaternion& b = f.at(i1, i2, i3);
  return {acc.s + w * b.s, acc.v + w * b.v};
}

}  // namespace detail

// Periodic trilinear interpolation on one slice.
inline Biquaternion interpolate_space(const BiqField& f, const Vec3& x) {
  const Grid& g = f.grid;
  double u1 = x.x / g.h, u2 = x.y / g.h, u3 = x.z / g.h;
  int b1 = static_cast<int>(std::floor(u1));
  int b2 = static_cast<int>(std::floor(u2));
  int b3 = static_cast<int>(std::floor(u3));
  double f1 = u1 - b1, f2 = u2 - b2, f3 = u3 - b3;

  Biquaternion acc{};
  for (int d3 = 0; d3 <= 1; ++d3)
    for (int d2 = 0; d2 <= 1; ++d2)
      for (int d1 = 0; d1 <= 1; ++d1) {
        double w = (d1 ? f1 : 1.0 - f1) * (d2 ? f2 : 1.0 - f2) * (d3 ? f3 : 1.0 - f3);
        if (w != 0.0) acc = detail::lerp_weighted(f, b1 + d1, b2 + d2, b3 + d3, w, acc);
      }
  return acc;
}

// Lagrange interpolation in time over the nearest <= 4 slices, trilinear in
// space.  Times outside the stored window are clamped to the end slices.
inline Biquaternion interpolate_spacetime(const SampleStack& st, double tau, const Vec3& x) {
  const int ns = static_cast<int>(st.slices.size());
  double u = (tau - st.tau0) / st.dtau;
  int width = std::min(4, ns);
  int first = static_cast<int>(std::floor(u)) - (width - 1) / 2;
  first = std::clamp(first, 0, ns - width);

  Biquaternion acc{};
  for (int a = 0; a < width; ++a) {
    double w = 1.0;
    for (int b = 0; b < width; ++b) {
      if (a == b) continue;
      w *= (u - (first + b)) / static_cast<double>(a - b);
    }
    Biquaternion s = interpolate_space(st.slices[first + a], x);
    acc = {acc.s + w * s.s, acc.v + w * s.v};
  }
  return acc;
}

// Evaluator mapping (tau, y) -> Biquaternion, backed by an analytic callable
// or by interpolation over a stored stack.  Resolution hints drive the
// finite-difference step of the light-cone solvers.
struct SourceSampler {
  std::function<Biquaternion(double, const Vec3&)> eval;
  double h_hint = 0.0;   // 0 means analytic/no intrinsic resolution
  double dt_hint = 0.0;

  Biquaternion operator()(double tau, const Vec3& y) const { return eval(tau, y); }

  static SourceSampler analytic(std::function<Biquaternion(double, const Vec3&)> f) {
    return {std::move(f), 0.0, 0.0};
  }

  static SourceSampler from_stack(const SampleStack& st) {
    // capture by reference: stacks outlive solver calls by contract
    const SampleStack* p = &st;
    return {[p](double tau, const Vec3& y) { return interpolate_spacetime(*p, tau, y); },
            st.grid().h, st.dtau};
  }

  static SourceSampler from_field(const BiqField& f) {
    const BiqField* p = &f;
    return {[p](double, const Vec3& y) { return interpolate_space(*p, y); }, f.grid.h, 0.0};
  }

  static SourceSampler zero() {
    return {[](double, const Vec3&) { return Biquaternion{}; }, 0.0, 0.0};
  }
};

}  // namespace bq
