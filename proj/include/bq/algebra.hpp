#pragma once

// Biquaternion algebra: complex scalar + complex 3-vector with the
// noncommutative quaternionic product
//
//   (f + F) o (g + G) = (f g - (F,G)) + (f G + g F + [F,G])
//
// where (.,.) is the bilinear (non-conjugating) dot product and [.,.]
// the cross product.  All value types are immutable-by-convention and
// safe to use from any thread.

#include <cmath>
#include <complex>
#include <stdexcept>

namespace bq {

using Complex = std::complex<double>;

inline constexpr Complex I{0.0, 1.0};

inline bool finite(const Complex& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Plain real 3-vector.
struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
  friend Vec3 operator*(const Vec3& a, double s) { return s * a; }
  friend Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  Vec3& operator+=(const Vec3& b) { x += b.x; y += b.y; z += b.z; return *this; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
  return (1.0 / n) * a;
}

// Complex 3-vector.
struct Vec3c {
  Complex x{}, y{}, z{};

  Vec3c() = default;
  Vec3c(Complex x_, Complex y_, Complex z_) : x(x_), y(y_), z(z_) {}
  Vec3c(const Vec3& re, const Vec3& im)
      : x(re.x, im.x), y(re.y, im.y), z(re.z, im.z) {}
  explicit Vec3c(const Vec3& re) : x(re.x), y(re.y), z(re.z) {}

  Vec3 real() const { return {x.real(), y.real(), z.real()}; }
  Vec3 imag() const { return {x.imag(), y.imag(), z.imag()}; }

  friend Vec3c operator+(const Vec3c& a, const Vec3c& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3c operator-(const Vec3c& a, const Vec3c& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3c operator*(const Complex& s, const Vec3c& a) { return {s * a.x, s * a.y, s * a.z}; }
  friend Vec3c operator*(double s, const Vec3c& a) { return {s * a.x, s * a.y, s * a.z}; }
  friend Vec3c operator-(const Vec3c& a) { return {-a.x, -a.y, -a.z}; }
  Vec3c& operator+=(const Vec3c& b) { x += b.x; y += b.y; z += b.z; return *this; }
};

// Bilinear dot product, no conjugation.
inline Complex dot(const Vec3c& a, const Vec3c& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3c cross(const Vec3c& a, const Vec3c& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline Vec3c conj(const Vec3c& a) { return {std::conj(a.x), std::conj(a.y), std::conj(a.z)}; }
// Conjugating squared norm sum |a_i|^2.
inline double norm_sq(const Vec3c& a) { return std::norm(a.x) + std::norm(a.y) + std::norm(a.z); }
inline bool finite(const Vec3c& a) { return finite(a.x) && finite(a.y) && finite(a.z); }

// Biquaternion F = f + F: complex scalar part s, complex vector part v.
// Constructors reject non-finite components so algebraic invariants hold
// without NaN caveats downstream.
struct Biquaternion {
  Complex s{};
  Vec3c v{};

  Biquaternion() = default;
  Biquaternion(Complex scalar, Vec3c vector) : s(scalar), v(vector) {
    if (!finite(s) || !finite(v)) throw std::invalid_argument("Biquaternion: non-finite component");
  }
  explicit Biquaternion(Complex scalar) : Biquaternion(scalar, Vec3c{}) {}
  explicit Biquaternion(Vec3c vector) : Biquaternion(Complex{}, vector) {}

  // unchecked path for arithmetic results; overflow is caught by the
  // steppers' explicit non-finite scans, not by throwing mid-expression
  static Biquaternion raw(Complex scalar, Vec3c vector) noexcept {
    Biquaternion b;
    b.s = scalar;
    b.v = vector;
    return b;
  }

  friend Biquaternion operator+(const Biquaternion& a, const Biquaternion& b) {
    return raw(a.s + b.s, a.v + b.v);
  }
  friend Biquaternion operator-(const Biquaternion& a, const Biquaternion& b) {
    return raw(a.s - b.s, a.v - b.v);
  }
  friend Biquaternion operator-(const Biquaternion& a) { return raw(-a.s, -a.v); }
  friend Biquaternion operator*(const Complex& c, const Biquaternion& a) {
    return raw(c * a.s, c * a.v);
  }
  friend Biquaternion operator*(double c, const Biquaternion& a) { return Complex(c) * a; }
  Biquaternion& operator+=(const Biquaternion& b) { s += b.s; v += b.v; return *this; }
};

inline bool finite(const Biquaternion& a) { return finite(a.s) && finite(a.v); }

// Quaternionic product, Hamilton-style on the complexified vector part.
inline Biquaternion mul(const Biquaternion& a, const Biquaternion& b) {
  return Biquaternion::raw(a.s * b.s - dot(a.v, b.v), a.s * b.v + b.s * a.v + cross(a.v, b.v));
}
inline Biquaternion operator*(const Biquaternion& a, const Biquaternion& b) { return mul(a, b); }

// Componentwise complex conjugation (an algebra automorphism).
inline Biquaternion conj_complex(const Biquaternion& a) {
  return Biquaternion::raw(std::conj(a.s), conj(a.v));
}

// Quaternionic conjugation F* = conj(f) - conj(F) (an antiautomorphism).
inline Biquaternion conj_quat(const Biquaternion& a) {
  return Biquaternion::raw(std::conj(a.s), -conj(a.v));
}

// Bilinear scalar product f1 f2 + (F1,F2); no conjugation.
inline Complex scalar_product(const Biquaternion& a, const Biquaternion& b) {
  return a.s * b.s + dot(a.v, b.v);
}

struct Norms {
  double norm;           // sqrt(|f|^2 + sum |F_i|^2)
  double pseudonorm_sq;  // |f|^2 - sum |F_i|^2, may be negative
};

inline Norms norms(const Biquaternion& a) {
  double s2 = std::norm(a.s);
  double v2 = norm_sq(a.v);
  return {std::sqrt(s2 + v2), s2 - v2};
}

inline double norm(const Biquaternion& a) { return norms(a).norm; }
inline double pseudonorm_sq(const Biquaternion& a) { return norms(a).pseudonorm_sq; }

inline bool is_selfconjugate(const Biquaternion& a, double tol = 1e-12) {
  Biquaternion d = conj_quat(a) - a;
  return norm(d) <= tol * (1.0 + norm(a));
}

// Boost rotor U = cosh(theta) + i e sinh(theta), ||e|| = 1.  U o conj_complex(U) = 1.
inline Biquaternion boost_rotor(double theta, const Vec3& axis) {
  Vec3 e = normalized(axis);
  return {Complex(std::cosh(theta)), Vec3c(Vec3{}, std::sinh(theta) * e)};
}

// Rotation rotor W = cos(phi) + e sin(phi); conjugation by W rotates by 2 phi about e.
inline Biquaternion rotation_rotor(double phi, const Vec3& axis) {
  Vec3 e = normalized(axis);
  return {Complex(std::cos(phi)), Vec3c(std::sin(phi) * e)};
}

inline Biquaternion one() { return Biquaternion{Complex(1.0)}; }

// Minkowski event Z = tau + i x.
inline Biquaternion event(double tau, const Vec3& x) {
  return {Complex(tau), Vec3c(Vec3{}, x)};
}

}  // namespace bq
