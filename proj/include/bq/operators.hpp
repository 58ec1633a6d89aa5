#pragma once

// Discrete differential operators on periodic grids: grad/div/curl, the
// mutual complex gradients (bigradients) and the wave operator.
//
// The bigradients act quaternionically,
//   nabla^{+-} F = (dtau f -+ i div F) + dtau F +- i grad f +- i rot F,
// and factor the wave operator: box = nabla^- o nabla^+ = nabla^+ o nabla^-.
// Time derivatives come from 3-point central differences over a Stack;
// spatial stencils are central of order 2 (default) or 4.

#include <array>
#include <stdexcept>

#include "bq/field.hpp"

namespace bq {

enum class Sign { plus, minus };

inline double sign_value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }

namespace detail {

inline void check_order(int order, int n) {
  if (order != 2 && order != 4) throw std::invalid_argument("stencil order must be 2 or 4");
  if (n < order + 1) throw std::invalid_argument("grid too small for stencil order");
}

// Central first derivative along axis at (i1,i2,i3).
template <class T>
T d_axis(const Field<T>& f, int axis, int i1, int i2, int i3, int order) {
  const double h = f.grid.h;
  auto shift = [&](int s) {
    int j1 = i1, j2 = i2, j3 = i3;
    (axis == 0 ? j1 : axis == 1 ? j2 : j3) += s;
    return f.at(j1, j2, j3);
  };
  if (order == 2) return (1.0 / (2.0 * h)) * (shift(1) - shift(-1));
  return (1.0 / (12.0 * h)) * (8.0 * (shift(1) - shift(-1)) - (shift(2) - shift(-2)));
}

}  // namespace detail

template <class T>
Field<T> partial(const Field<T>& f, int axis, int order = 2) {
  detail::check_order(order, f.grid.n);
  Field<T> out(f.grid);
  const int n = f.grid.n;
  for (int i3 = 0; i3 < n; ++i3)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i1 = 0; i1 < n; ++i1)
        out.at(i1, i2, i3) = detail::d_axis(f, axis, i1, i2, i3, order);
  return out;
}

template <class T>
Field<T> gradient_component(const Field<T>& f, int axis, int order = 2) {
  return partial(f, axis, order);
}

inline CVecField gradient(const CScalarField& f, int order = 2) {
  detail::check_order(order, f.grid.n);
  CVecField out(f.grid);
  const int n = f.grid.n;
  for (int i3 = 0; i3 < n; ++i3)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i1 = 0; i1 < n; ++i1)
        out.at(i1, i2, i3) = {detail::d_axis(f, 0, i1, i2, i3, order),
                              detail::d_axis(f, 1, i1, i2, i3, order),
                              detail::d_axis(f, 2, i1, i2, i3, order)};
  return out;
}

inline CScalarField divergence(const CVecField& v, int order = 2) {
  detail::check_order(order, v.grid.n);
  CScalarField out(v.grid);
  const int n = v.grid.n;
  CScalarField vx(v.grid), vy(v.grid), vz(v.grid);
  for (std::size_t i = 0; i < v.size(); ++i) {
    vx[i] = v[i].x;
    vy[i] = v[i].y;
    vz[i] = v[i].z;
  }
  for (int i3 = 0; i3 < n; ++i3)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i1 = 0; i1 < n; ++i1)
        out.at(i1, i2, i3) = detail::d_axis(vx, 0, i1, i2, i3, order) +
                             detail::d_axis(vy, 1, i1, i2, i3, order) +
                             detail::d_axis(vz, 2, i1, i2, i3, order);
  return out;
}

inline CVecField curl(const CVecField& v, int order = 2) {
  detail::check_order(order, v.grid.n);
  CVecField out(v.grid);
  const int n = v.grid.n;
  CScalarField vx(v.grid), vy(v.grid), vz(v.grid);
  for (std::size_t i = 0; i < v.size(); ++i) {
    vx[i] = v[i].x;
    vy[i] = v[i].y;
    vz[i] = v[i].z;
  }
  for (int i3 = 0; i3 < n; ++i3)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i1 = 0; i1 < n; ++i1) {
        Complex dyz = detail::d_axis(vz, 1, i1, i2, i3, order);
        Complex dzy = detail::d_axis(vy, 2, i1, i2, i3, order);
        Complex dzx = detail::d_axis(vx, 2, i1, i2, i3, order);
        Complex dxz = detail::d_axis(vz, 0, i1, i2, i3, order);
        Complex dxy = detail::d_axis(vy, 0, i1, i2, i3, order);
        Complex dyx = detail::d_axis(vx, 1, i1, i2, i3, order);
        out.at(i1, i2, i3) = {dyz - dzy, dzx - dxz, dxy - dyx};
      }
  return out;
}

struct SpatialDerivatives {
  CVecField grad_s;   // gradient of the scalar part
  CScalarField div_v; // divergence of the vector part
  CVecField curl_v;   // curl of the vector part
};

inline SpatialDerivatives spatial_derivatives(const BiqField& f, int order = 2) {
  CScalarField s(f.grid);
  CVecField v(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    s[i] = f[i].s;
    v[i] = f[i].v;
  }
  return {gradient(s, order), divergence(v, order), curl(v, order)};
}

// Spatial quaternionic derivative D F = (0 + i grad) o F
//   = (-i div F) + i grad f + i rot F.
// The bigradients are nabla^{+-} F = dtau F +- D F.
// Flat-index hot loop; wrapped neighbor offsets are resolved per axis index.
inline void spatial_quaternion_derivative_into(const BiqField& f, int order, BiqField& out) {
  detail::check_order(order, f.grid.n);
  if (out.grid != f.grid) out = BiqField(f.grid);
  const int n = f.grid.n;
  const std::ptrdiff_t sx = 1, sy = n, sz = static_cast<std::ptrdiff_t>(n) * n;
  const double c1 = (order == 2) ? 1.0 / (2.0 * f.grid.h) : 8.0 / (12.0 * f.grid.h);
  const double c2 = (order == 2) ? 0.0 : -1.0 / (12.0 * f.grid.h);
  const Biquaternion* src = f.data.data();
  Biquaternion* dst = out.data.data();

  // wrapped +-1 and +-2 offsets along one axis of length n at index i
  auto off = [n](int i, int s) {
    int j = i + s;
    if (j >= n) j -= n;
    if (j < 0) j += n;
    return j - i;
  };

  for (int i3 = 0; i3 < n; ++i3) {
    std::ptrdiff_t zp1 = off(i3, 1) * sz, zm1 = off(i3, -1) * sz;
    std::ptrdiff_t zp2 = off(i3, 2) * sz, zm2 = off(i3, -2) * sz;
    for (int i2 = 0; i2 < n; ++i2) {
      std::ptrdiff_t yp1 = off(i2, 1) * sy, ym1 = off(i2, -1) * sy;
      std::ptrdiff_t yp2 = off(i2, 2) * sy, ym2 = off(i2, -2) * sy;
      std::ptrdiff_t row = i2 * sy + i3 * sz;
      for (int i1 = 0; i1 < n; ++i1) {
        std::ptrdiff_t q = row + i1;
        std::ptrdiff_t xp1 = off(i1, 1) * sx, xm1 = off(i1, -1) * sx;
        Biquaternion dx = c1 * (src[q + xp1] - src[q + xm1]);
        Biquaternion dy = c1 * (src[q + yp1] - src[q + ym1]);
        Biquaternion dz = c1 * (src[q + zp1] - src[q + zm1]);
        if (order == 4) {
          std::ptrdiff_t xp2 = off(i1, 2) * sx, xm2 = off(i1, -2) * sx;
          dx += c2 * (src[q + xp2] - src[q + xm2]);
          dy += c2 * (src[q + yp2] - src[q + ym2]);
          dz += c2 * (src[q + zp2] - src[q + zm2]);
        }
        Complex div_v = dx.v.x + dy.v.y + dz.v.z;
        Vec3c grad_s{dx.s, dy.s, dz.s};
        Vec3c curl_v{dy.v.z - dz.v.y, dz.v.x - dx.v.z, dx.v.y - dy.v.x};
        dst[q] = Biquaternion::raw(-I * div_v, I * grad_s + I * curl_v);
      }
    }
  }
}

inline BiqField spatial_quaternion_derivative(const BiqField& f, int order = 2) {
  BiqField out(f.grid);
  spatial_quaternion_derivative_into(f, order, out);
  return out;
}

// Central time derivative of a stack at slice j (default: center).
template <class T>
Field<T> time_derivative(const Stack<T>& st, int j = -1) {
  if (j < 0) j = st.center();
  if (j < 1 || j + 1 >= static_cast<int>(st.slices.size()))
    throw std::invalid_argument("time_derivative: slice has no neighbors");
  Field<T> out(st.grid());
  const double f = 1.0 / (2.0 * st.dtau);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = f * (st.slices[j + 1][i] - st.slices[j - 1][i]);
  return out;
}

// Discrete bigradient nabla^{+-} at slice j of the stack.
inline BiqField bigradient(const SampleStack& st, Sign sign, int order = 2, int j = -1) {
  if (j < 0) j = st.center();
  BiqField dt = time_derivative(st, j);
  BiqField d = spatial_quaternion_derivative(st.slices[j], order);
  const double sg = sign_value(sign);
  BiqField out(st.grid());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = Biquaternion::raw(dt[i].s + sg * d[i].s, dt[i].v + sg * d[i].v);
  return out;
}

// Discrete wave operator (dtau^2 - Laplace) at the center slice.
inline BiqField wave_operator(const SampleStack& st, int order = 2) {
  const int j = st.center();
  if (j < 1 || j + 1 >= static_cast<int>(st.slices.size()))
    throw std::invalid_argument("wave_operator: need >= 3 slices");
  const Grid& g = st.grid();
  detail::check_order(order, g.n);
  BiqField out(g);
  const double it2 = 1.0 / (st.dtau * st.dtau);
  const BiqField& c = st.slices[j];
  const BiqField& p = st.slices[j - 1];
  const BiqField& q = st.slices[j + 1];

  // second-derivative stencil along one axis
  auto lap = [&](int i1, int i2, int i3) {
    const double h2 = 1.0 / (g.h * g.h);
    Biquaternion acc{};
    for (int axis = 0; axis < 3; ++axis) {
      auto shift = [&](int s) {
        int j1 = i1, j2 = i2, j3 = i3;
        (axis == 0 ? j1 : axis == 1 ? j2 : j3) += s;
        return c.at(j1, j2, j3);
      };
      if (order == 2) {
        acc += h2 * (shift(1) - 2.0 * shift(0) + shift(-1));
      } else {
        acc += (h2 / 12.0) *
               (-shift(2) + 16.0 * shift(1) - 30.0 * shift(0) + 16.0 * shift(-1) - shift(-2));
      }
    }
    return acc;
  };

  for (int i3 = 0; i3 < g.n; ++i3)
    for (int i2 = 0; i2 < g.n; ++i2)
      for (int i1 = 0; i1 < g.n; ++i1) {
        std::size_t i = g.idx(i1, i2, i3);
        Biquaternion dtt = it2 * (q[i] - 2.0 * c[i] + p[i]);
        out[i] = dtt - lap(i1, i2, i3);
      }
  return out;
}

// Largest |component| over a field, used by residual diagnostics.
inline double max_norm(const BiqField& f) {
  double m = 0.0;
  for (const auto& b : f.data) {
    m = std::max(m, std::abs(b.s.real()));
    m = std::max(m, std::abs(b.s.imag()));
    for (Complex c : {b.v.x, b.v.y, b.v.z}) {
      m = std::max(m, std::abs(c.real()));
      m = std::max(m, std::abs(c.imag()));
    }
  }
  return m;
}

inline double max_norm(const CScalarField& f) {
  double m = 0.0;
  for (const auto& c : f.data) m = std::max({m, std::abs(c.real()), std::abs(c.imag())});
  return m;
}

inline double max_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.data) m = std::max(m, std::abs(v));
  return m;
}

inline double max_norm(const VecField& f) {
  double m = 0.0;
  for (const auto& v : f.data) m = std::max({m, std::abs(v.x), std::abs(v.y), std::abs(v.z)});
  return m;
}

inline double max_norm(const CVecField& f) {
  double m = 0.0;
  for (const auto& v : f.data)
    for (Complex c : {v.x, v.y, v.z}) m = std::max({m, std::abs(c.real()), std::abs(c.imag())});
  return m;
}

}  // namespace bq
