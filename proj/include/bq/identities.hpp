#pragma once

// Randomized identity batteries over the algebra and the Lorentz machinery.
// The product is pluggable so a deliberately broken multiplication can serve
// as a negative control for the battery itself.

#include <string>
#include <vector>

#include "bq/lorentz.hpp"
#include "bq/rng.hpp"

namespace bq {

struct IdentityReport {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_residual <= tolerance; }
};

using ProductFn = Biquaternion (*)(const Biquaternion&, const Biquaternion&);

// test hook: one flipped structure constant
inline Biquaternion mul_corrupted(const Biquaternion& a, const Biquaternion& b) {
  Biquaternion m = mul(a, b);
  return Biquaternion::raw(m.s + 0.05 * a.v.x * b.v.y, m.v);
}

inline std::vector<IdentityReport> algebra_battery(std::uint64_t seed, long long count,
                                                   ProductFn prod = &mul) {
  Rng rng(seed);
  IdentityReport assoc{"associativity", 0, 1e-12};
  IdentityReport distr{"distributivity", 0, 1e-12};
  IdentityReport scal{"scalar-compatibility", 0, 1e-12};
  IdentityReport invc{"conj-complex-involution", 0, 1e-14};
  IdentityReport invq{"conj-quat-involution", 0, 1e-14};
  IdentityReport rotor{"boost-rotor-inverse", 0, 1e-12};
  IdentityReport zid{"event-pseudonorm-product", 0, 1e-12};
  IdentityReport zsc{"event-selfconjugate", 0, 1e-14};
  IdentityReport unit{"quaternion-unit-relations", 0, 1e-15};

  // unit relations once; they are exact
  {
    Biquaternion q1{Vec3c{Complex(1), Complex(0), Complex(0)}};
    Biquaternion q2{Vec3c{Complex(0), Complex(1), Complex(0)}};
    Biquaternion q3{Vec3c{Complex(0), Complex(0), Complex(1)}};
    unit.max_residual = std::max(norm(prod(q1, q2) - q3), norm(prod(q2, q1) + q3));
  }

  for (long long it = 0; it < count; ++it) {
    Biquaternion a = rng.biquaternion(), b = rng.biquaternion(), c = rng.biquaternion();
    double scale = 1.0 + norm(a) * norm(b) * (1.0 + norm(c));

    assoc.max_residual = std::max(
        assoc.max_residual, norm(prod(prod(a, b), c) - prod(a, prod(b, c))) / scale);
    distr.max_residual = std::max(
        distr.max_residual, norm(prod(a, b + c) - (prod(a, b) + prod(a, c))) / scale);
    Complex lam = rng.complex_in(2.0);
    scal.max_residual =
        std::max(scal.max_residual, norm(prod(lam * a, b) - lam * prod(a, b)) / scale);

    invc.max_residual =
        std::max(invc.max_residual, norm(conj_complex(conj_complex(a)) - a) / (1.0 + norm(a)));
    invq.max_residual =
        std::max(invq.max_residual, norm(conj_quat(conj_quat(a)) - a) / (1.0 + norm(a)));

    Biquaternion u = boost_rotor(rng.uniform(-3, 3), rng.unit_vec());
    rotor.max_residual = std::max(rotor.max_residual, norm(prod(u, conj_complex(u)) - one()));

    Biquaternion z = event(rng.uniform(-2, 2),
                           {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)});
    zsc.max_residual = std::max(zsc.max_residual, norm(conj_quat(z) - z));
    zid.max_residual =
        std::max(zid.max_residual, norm(prod(z, conj_complex(z)) -
                                        Biquaternion{Complex(pseudonorm_sq(z))}) /
                                       (1.0 + norm(z) * norm(z)));
  }
  return {assoc, distr, scal, invc, invq, rotor, zid, zsc, unit};
}

inline std::vector<IdentityReport> lorentz_battery(std::uint64_t seed, long long count,
                                                   double vmax = 0.9) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  IdentityReport pseudo{"pseudonorm-invariance", 0, 1e-12};
  IdentityReport unit{"lorentz-unit", 0, 1e-12};
  IdentityReport inverse{"lorentz-group-inverse", 0, 1e-12};
  IdentityReport cc{"closed-form-charge-current", 0, 1e-12};
  IdentityReport tension{"closed-form-tension", 0, 1e-12};
  IdentityReport pf{"closed-form-power-force", 0, 1e-12};
  IdentityReport emergent{"tension-emergent-scalar", 0, 1e-12};

  constexpr double pi = 3.14159265358979323846;
  for (long long it = 0; it < count; ++it) {
    double v = rng.uniform(-vmax, vmax);
    Vec3 e = rng.unit_vec();
    double phi = rng.uniform(-pi, pi);
    LorentzBiq lt = make_lorentz(v, e, phi);

    Biquaternion z = event(rng.uniform(-2, 2),
                           {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)});
    Biquaternion zp = transform_event(lt, z);
    pseudo.max_residual =
        std::max(pseudo.max_residual,
                 std::abs(pseudonorm_sq(zp) - pseudonorm_sq(z)) / (1.0 + norm(z) * norm(z)));

    unit.max_residual = std::max(unit.max_residual, lorentz_unit_residual(lt));

    LorentzBiq back = make_lorentz(-v, e, -phi);
    Biquaternion k = rng.biquaternion();
    inverse.max_residual =
        std::max(inverse.max_residual,
                 norm(transform_biq(back, transform_biq(lt, k)) - k) / (1.0 + norm(k)));

    LorentzBiq boost = make_lorentz(v, e, 0.0);

    Complex rho = rng.complex_in(2.0);
    Vec3c J{rng.complex_in(2.0), rng.complex_in(2.0), rng.complex_in(2.0)};
    Biquaternion theta{-I * rho, -J};
    auto cf = boost_charge_current(rho, J, v, e);
    cc.max_residual =
        std::max(cc.max_residual, norm(transform_biq(boost, theta) -
                                       Biquaternion{-I * cf.rho, -cf.J}) /
                                      (1.0 + norm(theta)));

    Vec3c A{rng.complex_in(2.0), rng.complex_in(2.0), rng.complex_in(2.0)};
    Biquaternion ap = transform_biq(boost, Biquaternion{A});
    auto tf = boost_tension(A, v, e);
    tension.max_residual = std::max(
        tension.max_residual, norm(ap - Biquaternion{tf.scalar, tf.A}) / (1.0 + norm_sq(A)));
    double sh2 = 2.0 * std::sinh(boost.theta) * std::cosh(boost.theta);
    emergent.max_residual =
        std::max(emergent.max_residual,
                 std::abs(ap.s - (-I * sh2 * dot(Vec3c(e), A))) / (1.0 + norm_sq(A)));

    Complex M = rng.complex_in(2.0);
    Vec3c F{rng.complex_in(2.0), rng.complex_in(2.0), rng.complex_in(2.0)};
    auto pfc = boost_power_force(M, F, v, e);
    pf.max_residual =
        std::max(pf.max_residual, norm(transform_biq(boost, Biquaternion{M, -I * F}) -
                                       Biquaternion{pfc.M, -I * pfc.F}) /
                                      (1.0 + std::abs(M) + norm_sq(F)));
  }
  return {pseudo, unit, inverse, cc, tension, pf, emergent};
}

}  // namespace bq
