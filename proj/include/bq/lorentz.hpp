#pragma once

// Lorentz boosts and rotations as biquaternion conjugations.
//
// L = W o U with U = cosh(theta) + i e sinh(theta) (boost half-rapidity
// theta, cosh 2theta = gamma) and W = cos(phi) + e sin(phi) (rotation by
// 2 phi about e).  Events and field values transform by the same sandwich
//   K' = L o K o L*,
// whose inverse is K = conj(L*) o K' o conj(L).  On events this reproduces
// the textbook boost/rotation formulas; on tension/charge-current/power-force
// values it reproduces the closed relativistic component forms, including
// the emergent resistance scalar -i v gamma (e,A) on a pure-vector tension.
// Under this map a bigradient source G = nabla^+ K transforms with a
// complex-conjugated left factor: G' = conj(L) o G o L*.

#include <cmath>
#include <stdexcept>

#include "bq/algebra.hpp"
#include "bq/sampler.hpp"

namespace bq {

struct LorentzBiq {
  Biquaternion L;
  Vec3 e;        // shared boost/rotation axis, unit
  double theta;  // boost half-rapidity
  double phi;    // rotation half-angle
  double v;      // boost speed, |v| < 1

  Biquaternion star() const { return conj_quat(L); }
  Biquaternion bar() const { return conj_complex(L); }
  Biquaternion bar_star() const { return conj_quat(conj_complex(L)); }  // = L^{-1}
};

inline LorentzBiq make_lorentz(double v, const Vec3& axis, double phi = 0.0) {
  if (!(std::abs(v) < 1.0)) throw std::invalid_argument("make_lorentz: |v| must be < 1");
  Vec3 e = normalized(axis);
  double gamma = 1.0 / std::sqrt(1.0 - v * v);
  // half-rapidity relations, stable for small v
  double ch = std::sqrt(0.5 * (gamma + 1.0));
  double sh = (v < 0 ? -1.0 : 1.0) * std::sqrt(0.5 * (gamma - 1.0));
  double theta = std::asinh(sh);
  Biquaternion u{Complex(ch), Vec3c(Vec3{}, sh * e)};
  Biquaternion w = rotation_rotor(phi, e);
  return {mul(w, u), e, theta, phi, v};
}

// Residual of the defining identity conj(L) o L* = 1.
inline double lorentz_unit_residual(const LorentzBiq& lt) {
  return norm(mul(lt.bar(), lt.star()) - one());
}

// Z' = L o Z o L* for an event Z = tau + i x (real structure enforced).
inline Biquaternion transform_event(const LorentzBiq& lt, const Biquaternion& Z) {
  double scale = 1.0 + norm(Z);
  if (std::abs(Z.s.imag()) > 1e-12 * scale || norm(Z.v.real()) > 1e-12 * scale)
    throw std::invalid_argument("transform_event: Z must be tau + i x with real tau, x");
  return mul(mul(lt.L, Z), lt.star());
}

// Same sandwich applied to an arbitrary field value.
inline Biquaternion transform_biq(const LorentzBiq& lt, const Biquaternion& K) {
  return mul(mul(lt.L, K), lt.star());
}

// Inverse event map Z = conj(L*) o Z' o conj(L).
inline Biquaternion inverse_event(const LorentzBiq& lt, const Biquaternion& Zp) {
  return mul(mul(lt.bar_star(), Zp), lt.bar());
}

// Transform law of a bigradient source: if K' = L o K o L* then
// nabla'^{+} K' = conj(L) o (nabla^+ K) o L*.
inline Biquaternion transform_source(const LorentzBiq& lt, const Biquaternion& G) {
  return mul(mul(lt.bar(), G), lt.star());
}

// ---- printed closed forms (pure boost, phi = 0) ----

namespace detail {

inline void check_boost(double v) {
  if (!(std::abs(v) < 1.0)) throw std::invalid_argument("closed form: |v| must be < 1");
}

}  // namespace detail

struct TensionTransform {
  Vec3c A;         // (A - e(e,A)) + e gamma (e,A)
  Complex scalar;  // emergent resistance part -i v gamma (e,A)
};

inline TensionTransform boost_tension(const Vec3c& A, double v, const Vec3& axis) {
  detail::check_boost(v);
  Vec3 e = normalized(axis);
  double gamma = 1.0 / std::sqrt(1.0 - v * v);
  Complex eA = dot(Vec3c(e), A);
  Vec3c out = A + (gamma - 1.0) * eA * Vec3c(e);
  return {out, -I * (v * gamma) * eA};
}

struct ChargeCurrentTransform {
  Complex rho;
  Vec3c J;
};

inline ChargeCurrentTransform boost_charge_current(Complex rho, const Vec3c& J, double v,
                                                   const Vec3& axis) {
  detail::check_boost(v);
  Vec3 e = normalized(axis);
  double gamma = 1.0 / std::sqrt(1.0 - v * v);
  Complex eJ = dot(Vec3c(e), J);
  Complex rho_p = gamma * (rho - v * eJ);
  Vec3c J_p = J - eJ * Vec3c(e) + (gamma * (eJ - v * rho)) * Vec3c(e);
  return {rho_p, J_p};
}

struct PowerForceTransform {
  Complex M;
  Vec3c F;
};

// Scalar follows the hyperbolic expansion M' = M cosh 2theta - (e,F) sinh 2theta;
// the vector part is the displayed relativistic force formula.
inline PowerForceTransform boost_power_force(Complex M, const Vec3c& F, double v,
                                             const Vec3& axis) {
  detail::check_boost(v);
  Vec3 e = normalized(axis);
  double gamma = 1.0 / std::sqrt(1.0 - v * v);
  Complex eF = dot(Vec3c(e), F);
  Complex M_p = gamma * (M - v * eF);
  Vec3c F_p = F - eF * Vec3c(e) + (gamma * (eF - v * M)) * Vec3c(e);
  return {M_p, F_p};
}

// ---- whole-field transform with event resampling ----

// K'(Z') = L o K(Z) o L* with Z = inverse_event(Z'); trilinear interpolation
// in space, cubic in time over the stored history.
inline BiqField transform_field(const LorentzBiq& lt, const SampleStack& history,
                                double tau_prime) {
  const Grid& g = history.grid();
  BiqField out(g);
  for (int i3 = 0; i3 < g.n; ++i3)
    for (int i2 = 0; i2 < g.n; ++i2)
      for (int i1 = 0; i1 < g.n; ++i1) {
        Biquaternion zp = event(tau_prime, g.coord(i1, i2, i3));
        Biquaternion z = inverse_event(lt, zp);
        double tau = z.s.real();
        Vec3 x = z.v.imag();
        Biquaternion k = interpolate_spacetime(history, tau, x);
        out.at(i1, i2, i3) = transform_biq(lt, k);
      }
  return out;
}

}  // namespace bq
